//! One network drop: user positions, cache placement, requests and roles.

use rand::Rng;

use super::{Placement, SimConfig};
use crate::sampling::{trial_rng, GroupSampler, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Coop,
    Noncoop,
    Cellular,
}

/// Users are numbered cluster by cluster: user `c * K + j` is the `j`-th member
/// of cluster `c` and caches group `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub positions: Vec<[f64; 2]>,
    pub cluster_of: Vec<usize>,
    pub cache_group_of: Vec<usize>,
    pub request_of: Vec<usize>,
    pub roles: Vec<Role>,
    pub hit_groups: Vec<usize>,
    pub users_per_cluster: usize,
    pub n_clusters: usize,
}

impl Snapshot {
    /// 1 when some cached group is requested in every cluster, else 0.
    pub fn mode(&self) -> u8 {
        u8::from(!self.hit_groups.is_empty())
    }

    pub fn members(&self, cluster: usize) -> std::ops::Range<usize> {
        cluster * self.users_per_cluster..(cluster + 1) * self.users_per_cluster
    }

    /// The member of `cluster` that caches `group`.
    pub fn cache_holder(&self, cluster: usize, group: usize) -> usize {
        cluster * self.users_per_cluster + group
    }

    pub fn count(&self, role: Role) -> usize {
        self.roles.iter().filter(|&&r| r == role).count()
    }
}

/// Draws the snapshot of trial `trial`. Requests range over the whole catalog;
/// a request for group `k < K` counts toward the hit test even when the user
/// caches `k` itself.
pub fn drop_snapshot(config: &SimConfig, trial: u64) -> Snapshot {
    let k = config.plan.users_per_cluster;
    let b = config.plan.n_clusters;
    let side = config.plan.grid_side().unwrap_or(1);
    let n_users = k * b;

    let mut rng = trial_rng(config.seed, trial, Stream::Placement);
    let positions = match config.placement {
        Placement::PerCell => place_per_cell(&mut rng, k, side, config.plan.cluster_side),
        Placement::Uniform => place_uniform(&mut rng, k, side, config.plan.hotspot_side),
    };

    let sampler = GroupSampler::new(config.popularity.group_probs());
    let mut rng = trial_rng(config.seed, trial, Stream::Requests);
    let request_of: Vec<usize> = (0..n_users).map(|_| sampler.sample(&mut rng)).collect();

    let hit_groups: Vec<usize> = (0..k)
        .filter(|&g| (0..b).all(|c| request_of[c * k..(c + 1) * k].contains(&g)))
        .collect();
    let roles = request_of
        .iter()
        .map(|&g| {
            if g >= k {
                Role::Cellular
            } else if hit_groups.contains(&g) {
                Role::Coop
            } else {
                Role::Noncoop
            }
        })
        .collect();

    Snapshot {
        positions,
        cluster_of: (0..n_users).map(|u| u / k).collect(),
        cache_group_of: (0..n_users).map(|u| u % k).collect(),
        request_of,
        roles,
        hit_groups,
        users_per_cluster: k,
        n_clusters: b,
    }
}

/// Lower-left corner of cluster `c`, which sits in row `c / side` and column
/// `c % side` of the grid.
pub fn cell_origin(cluster: usize, side: usize, cell: f64) -> [f64; 2] {
    [(cluster % side) as f64 * cell, (cluster / side) as f64 * cell]
}

fn place_per_cell<R: Rng>(rng: &mut R, k: usize, side: usize, cell: f64) -> Vec<[f64; 2]> {
    let mut points = Vec::with_capacity(k * side * side);
    for c in 0..side * side {
        let [x0, y0] = cell_origin(c, side, cell);
        for _ in 0..k {
            points.push([x0 + rng.random::<f64>() * cell, y0 + rng.random::<f64>() * cell]);
        }
    }
    points
}

/// Uniform over the hotspot, then split into `side` vertical strips by `x` and
/// each strip into `side` blocks by `y`, so every cluster still has `k` users.
fn place_uniform<R: Rng>(rng: &mut R, k: usize, side: usize, hotspot: f64) -> Vec<[f64; 2]> {
    let mut points: Vec<[f64; 2]> =
        (0..k * side * side).map(|_| [rng.random::<f64>() * hotspot, rng.random::<f64>() * hotspot]).collect();
    points.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut placed = vec![[0.0; 2]; points.len()];
    for (col, strip) in points.chunks_mut(k * side).enumerate() {
        strip.sort_by(|a, b| a[1].total_cmp(&b[1]));
        for (row, block) in strip.chunks(k).enumerate() {
            let c = row * side + col;
            placed[c * k..(c + 1) * k].copy_from_slice(block);
        }
    }
    placed
}
