//! The ergodic bound against Monte-Carlo resampling of interferer arrays,
//! with the desired link held fixed.

use backhaul::channel::{build_channel_matrix, place_antennas, LinkBudget};
use backhaul::geometry::NetworkRealization;
use backhaul::linkrate::{ergodic_lower_bound, interference_covariance, link_rate, ring_interference_constant, InterferenceField};
use backhaul::seed::derive_seed;

#[test]
fn mean_rate_dominates_ergodic_bound() {
    let (dim, c, psi) = (9usize, 100.0, 16usize);
    let budget = LinkBudget::new(4.0, 0.0, c, 0.64 / psi as f64).unwrap();
    let net = NetworkRealization::lattice(dim, c, 0.0, 0).unwrap();
    let info = *net.lattice_info().unwrap();
    let (rx_k, tx_k) = (info.index(4, 4), info.index(4, 5));
    let pos = net.positions();
    let rx = place_antennas(pos[rx_k], 8.0, psi, 1).unwrap();
    let tx = place_antennas(pos[tx_k], 8.0, psi, 2).unwrap();
    let h = build_channel_matrix(&tx, &rx, &budget).unwrap();
    let power = budget.power();
    let q = ring_interference_constant(4.0, power * budget.ref_snr(), dim / 2).unwrap().q;
    let bound = ergodic_lower_bound(&h, q, power, psi).unwrap();

    let resamples = 240u64;
    let rates: Vec<f64> = (0..resamples)
        .map(|t| {
            let mut field = InterferenceField::new(psi, power / psi as f64).unwrap();
            for k in (0..net.len()).filter(|&k| k != rx_k && k != tx_k) {
                let arr = place_antennas(pos[k], 8.0, psi, derive_seed(t, 3, k as u64)).unwrap();
                field.push(build_channel_matrix(&arr, &rx, &budget).unwrap()).unwrap();
            }
            let r = interference_covariance(&field).unwrap();
            link_rate(&h, r.as_ref(), power, psi, 1).unwrap()
        })
        .collect();
    let n = rates.len() as f64;
    let mean = rates.iter().sum::<f64>() / n;
    let se = (rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt();
    assert!(mean >= bound - 3.0 * se, "mean {mean} se {se} bound {bound}");
}
