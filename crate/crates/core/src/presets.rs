//! Reference models used by the examples, the CLI and the acceptance suite.

use crate::graph::CausalityGraph;
use crate::kernel::LinkKernel;
use crate::model::HawkesModel;

fn exp(alpha: f64, beta: f64) -> LinkKernel {
    LinkKernel::exponential(alpha, beta).expect("valid preset kernel")
}

/// Three-dimensional exponential-kernel model (spectral radius ≈ 0.506).
///
/// A reconstruction, not published coefficients: chosen so that
/// [`RECONSTRUCTION_HORIZON`] yields about 7500 events in total.
pub fn reconstruction_3d() -> HawkesModel {
    let z = LinkKernel::Zero;
    HawkesModel::new(
        vec![0.5, 0.4, 0.4],
        vec![
            vec![exp(1.2, 4.0), z.clone(), exp(0.8, 4.0)],
            vec![exp(1.2, 3.0), z.clone(), z.clone()],
            vec![z, exp(1.0, 2.5), exp(0.8, 4.0)],
        ],
    )
    .expect("valid preset")
}

/// Horizon at which [`reconstruction_3d`] produces ≈ 7500 expected events.
pub const RECONSTRUCTION_HORIZON: f64 = 2830.0;

/// Four components with five exponential links
/// `1→1, 1→2, 2→3, 3→4, 4→2` (spectral radius 1/3).
pub fn planted_4d() -> HawkesModel {
    let z = LinkKernel::Zero;
    let link = || exp(1.0, 3.0);
    HawkesModel::new(
        vec![0.5; 4],
        vec![
            vec![exp(0.9, 3.0), z.clone(), z.clone(), z.clone()],
            vec![link(), z.clone(), z.clone(), link()],
            vec![z.clone(), link(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), link(), z],
        ],
    )
    .expect("valid preset")
}

/// Ten-vertex topology with edges
/// `1→2, 1→4, 2→3, 2→6, 3→5, 3→4, 6→7, 7→8, 8→10`; vertex 9 is isolated.
pub fn ten_neuron_graph() -> CausalityGraph {
    let edges = [(1, 2), (1, 4), (2, 3), (2, 6), (3, 5), (3, 4), (6, 7), (7, 8), (8, 10)];
    let zero_based: Vec<(usize, usize)> = edges.iter().map(|(a, b)| (a - 1, b - 1)).collect();
    CausalityGraph::from_edges(10, &zero_based).expect("valid preset")
}
