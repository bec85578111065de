use obstrade_core::linalg::{cplx, CMat};
use obstrade_core::quantum::{ObservableSet, State, WeightMatrix};
use obstrade_core::sdp::SdpSettings;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    let d = 8;
    let n = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let psi = nalgebra::DVector::from_fn(d, |_, _| cplx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let rho = State::pure(&psi).unwrap();
    let mats: Vec<CMat> = (0..n).map(|_| {
        let m = CMat::from_fn(d, d, |_, _| cplx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        (&m + m.adjoint()).scale(0.5)
    }).collect();
    let x = ObservableSet::from_matrices(mats).unwrap();
    let w = WeightMatrix::identity(n);
    let t0 = std::time::Instant::now();
    let witness = obstrade_core::e0::bound_e0(&rho, &x, &w, &SdpSettings::default()).unwrap();
    println!("E0 = {:.9}  residuals {:?}  elapsed {:.1?}", witness.value, witness.residuals, t0.elapsed());
}
