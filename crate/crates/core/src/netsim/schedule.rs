//! Per-trial link selection for the cooperative and non-cooperative bands.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::snapshot::{Role, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub tx: usize,
    pub rx: usize,
    pub cluster: usize,
}

/// Joint transmission of one hit group: every cluster's holder of the group
/// transmits; `links` pairs each served receiver with its own cluster's holder.
#[derive(Debug, Clone, PartialEq)]
pub struct CoopTransmission {
    pub group: usize,
    pub transmitters: Vec<usize>,
    pub links: Vec<Link>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub coop: Option<CoopTransmission>,
    /// At most one link per cluster, ordered by cluster.
    pub noncoop: Vec<Link>,
}

impl Schedule {
    pub fn silent_clusters(&self, n_clusters: usize) -> usize {
        n_clusters - self.noncoop.len()
    }
}

/// Which requesters the non-cooperative band may serve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandUse {
    /// Mode 1 split: hit groups go to the cooperative band.
    Split,
    /// Every D2D-servable request competes on one band.
    Shared,
}

/// Picks the cooperative transmission (Mode 1, `Split` only) and one
/// non-cooperative link per cluster.
///
/// The hit group is drawn uniformly among hit groups whose every cluster has
/// a requester other than the holder itself; if there is none, among all hit
/// groups, and clusters without such a requester get no receiver.
pub fn schedule<R: Rng>(snapshot: &Snapshot, band: BandUse, rng: &mut R) -> Schedule {
    let b = snapshot.n_clusters;
    let coop = match band {
        BandUse::Split if !snapshot.hit_groups.is_empty() => Some(coop_transmission(snapshot, rng)),
        _ => None,
    };

    let mut noncoop = Vec::with_capacity(b);
    let mut eligible = Vec::with_capacity(snapshot.users_per_cluster);
    for c in 0..b {
        eligible.clear();
        eligible.extend(snapshot.members(c).filter(|&u| {
            let served = match band {
                BandUse::Split => snapshot.roles[u] == Role::Noncoop,
                BandUse::Shared => snapshot.roles[u] != Role::Cellular,
            };
            served && snapshot.request_of[u] != snapshot.cache_group_of[u]
        }));
        if let Some(&rx) = eligible.choose(rng) {
            noncoop.push(Link { tx: snapshot.cache_holder(c, snapshot.request_of[rx]), rx, cluster: c });
        }
    }
    Schedule { coop, noncoop }
}

fn coop_transmission<R: Rng>(snapshot: &Snapshot, rng: &mut R) -> CoopTransmission {
    let b = snapshot.n_clusters;
    let receivers = |g: usize, c: usize| {
        let holder = snapshot.cache_holder(c, g);
        snapshot.members(c).filter(move |&u| u != holder && snapshot.request_of[u] == g)
    };
    let complete: Vec<usize> =
        snapshot.hit_groups.iter().copied().filter(|&g| (0..b).all(|c| receivers(g, c).next().is_some())).collect();
    let pool = if complete.is_empty() { &snapshot.hit_groups } else { &complete };
    let group = *pool.choose(rng).expect("mode 1 has a hit group");

    let transmitters: Vec<usize> = (0..b).map(|c| snapshot.cache_holder(c, group)).collect();
    let links = (0..b)
        .filter_map(|c| {
            let candidates: Vec<usize> = receivers(group, c).collect();
            candidates.choose(rng).map(|&rx| Link { tx: transmitters[c], rx, cluster: c })
        })
        .collect();
    CoopTransmission { group, transmitters, links }
}
