use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rm_access::channel::{complex_gaussian, ChannelModel, Scenario};
use rm_access::detect::{combine_halves, estimate_channel, layer_spectrum_of, ls_scalar, residual_energy};
use rm_access::rm::{capacity, inner_product, walsh_row};
use rm_access::{
    detect_list, detect_single, generate_sequence, id_to_pair, synthesize, Complex64, ComplexSignal, Layer,
    ListParams, RmPair, UserId,
};

fn pair(m: usize, d: u128) -> RmPair {
    id_to_pair(UserId::new(d, m).unwrap())
}

fn random_h(rng: &mut ChaCha8Rng) -> Complex64 {
    let mag = 10f64.powf(rng.random_range(-1.0..1.0));
    Complex64::from_polar(mag, rng.random_range(0.0..std::f64::consts::TAU))
}

fn noisy(y: &ComplexSignal, n0: f64, rng: &mut ChaCha8Rng) -> ComplexSignal {
    ComplexSignal::new(y.iter().map(|v| v + complex_gaussian(rng, n0)).collect()).unwrap()
}

fn check_noiseless(m: usize, d: u128, h: Complex64) {
    let p = pair(m, d);
    let y = ComplexSignal::from_sequence(&generate_sequence(&p), h);
    let det = detect_single(&y).unwrap();
    assert_eq!(det.pair, p, "m={m} d={d}");
    assert!((det.h_hat - h).norm() <= 1e-10 * h.norm(), "m={m} d={d}");
}

#[test]
fn noiseless_exhaustive_small_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in 2..=4 {
        for d in 0..capacity(m) {
            for _ in 0..20 {
                check_noiseless(m, d, random_h(&mut rng));
            }
        }
    }
}

#[test]
fn noiseless_random_larger_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for m in 5..=10 {
        for _ in 0..1000 {
            let d = rng.random_range(0..capacity(m));
            for _ in 0..20 {
                check_noiseless(m, d, random_h(&mut rng));
            }
        }
    }
}

#[test]
fn combining_halves_the_noise_variance() {
    let (m, n0, trials) = (8, 2.0, 10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut energy = vec![0.0; m + 1];
    for _ in 0..trials {
        let zero = ComplexSignal::new(vec![Complex64::new(0.0, 0.0); 1 << m]).unwrap();
        let mut y = noisy(&zero, n0, &mut rng);
        energy[m] += y.energy() / y.len() as f64;
        for s in (2..=m).rev() {
            let alpha = rng.random_range(0..1u32 << (s - 1));
            let v = walsh_row(&Layer::from_mask(s, alpha).unwrap());
            y = combine_halves(&y, &v).unwrap();
            energy[s - 1] += y.energy() / y.len() as f64;
        }
    }
    for (s, e) in energy.iter().enumerate().skip(1) {
        let want = n0 / (1u64 << (m - s)) as f64;
        let got = e / trials as f64;
        assert!((got - want).abs() <= 0.1 * want, "s={s}: {got} vs {want}");
    }
}

#[test]
fn wrong_walsh_row_erases_half_the_signal() {
    let m = 7;
    let h = Complex64::new(0.6, -0.8);
    for d in [0u128, 1, 12345, capacity(m) - 1] {
        let p = pair(m, d);
        for s in 2..=m {
            let y = ComplexSignal::from_sequence(&p.sub_sequence(s).unwrap(), h);
            let truth = p.layer(s).unwrap();
            for alpha in (0..1u32 << (s - 1)).filter(|&a| a != truth.alpha_mask()) {
                let v = walsh_row(&Layer::from_mask(s, alpha).unwrap());
                let next = combine_halves(&y, &v).unwrap();
                let zeros = next.iter().filter(|v| v.norm() == 0.0).count();
                assert_eq!(zeros, 1 << (s - 2), "d={d} s={s} alpha={alpha}");
                assert!(next.iter().all(|v| v.norm() == 0.0 || (v - h).norm() < 1e-15 || (v + h).norm() < 1e-15));
            }
        }
    }
}

#[test]
fn forced_early_error_leaves_little_channel_energy() {
    let m = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let trials = 2000;
    let mut ratio = 0.0;
    for _ in 0..trials {
        let d = rng.random_range(0..capacity(m));
        let p = pair(m, d);
        let h = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let mut y = ComplexSignal::from_sequence(&generate_sequence(&p), h);
        let mut alphas = Vec::new();
        for s in (2..=m).rev() {
            let spec = layer_spectrum_of(&y).unwrap();
            let mut best = (0..spec.len()).max_by(|&a, &b| spec[a].re.total_cmp(&spec[b].re)).unwrap();
            if s == m {
                // inject an error in the first layer
                best = (best + 1 + rng.random_range(0..spec.len() - 1)) % spec.len();
            }
            let layer = Layer::from_mask(s, best as u32).unwrap();
            y = combine_halves(&y, &walsh_row(&layer)).unwrap();
            alphas.push(best as u32);
        }
        let guess = RmPair::from_layers(m, &alphas).unwrap();
        let h_hat = estimate_channel(&y, guess.b(m - 1)).unwrap();
        ratio += h_hat.norm() / h.norm();
    }
    let mean = ratio / trials as f64;
    assert!(mean < 0.25, "mean |h_hat| / |h| = {mean}");
}

#[test]
fn shared_top_layer_reinforces_the_peak() {
    let m = 7;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 50 {
        let p1 = pair(m, rng.random_range(0..capacity(m)));
        let p2 = pair(m, rng.random_range(0..capacity(m)));
        // give p2 the top layer of p1
        let mut alphas: Vec<u32> = (2..=m).rev().map(|s| p2.layer(s).unwrap().alpha_mask()).collect();
        alphas[0] = p1.layer(m).unwrap().alpha_mask();
        let q = RmPair::from_layers(m, &alphas).unwrap();
        if q != p1 {
            check_reinforcement(&p1, &q, &mut rng);
            checked += 1;
        }
    }
}

fn check_reinforcement(p1: &RmPair, p2: &RmPair, rng: &mut ChaCha8Rng) {
    let m = p1.order();
    let (h1, h2) = (random_h(rng), random_h(rng));
    let (c1, c2) = (generate_sequence(p1), generate_sequence(p2));
    let y: Vec<Complex64> = c1
        .chips()
        .iter()
        .zip(c2.chips())
        .map(|(&a, &b)| h1 * a as f64 + h2 * b as f64)
        .collect();
    let spec = layer_spectrum_of(&ComplexSignal::new(y).unwrap()).unwrap();
    let at = spec[p1.layer(m).unwrap().alpha_mask() as usize];
    let chi = inner_product(&p1.sub_sequence(m - 1).unwrap(), &p2.sub_sequence(m - 1).unwrap()).unwrap();
    let half = (1u64 << (m - 1)) as f64;
    let want = half * (h1.norm_sqr() + h2.norm_sqr()) + 2.0 * (h1.conj() * h2).re * chi as f64;
    assert!((at.re - want).abs() <= 1e-10 * want.abs().max(1.0));
    assert!(at.im.abs() <= 1e-10 * want.abs().max(1.0));
}

#[test]
fn wrong_pair_residual_is_ls_identity() {
    let m = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let p = pair(m, rng.random_range(0..capacity(m)));
        let wrong = pair(m, rng.random_range(0..capacity(m)));
        let y = ComplexSignal::from_sequence(&generate_sequence(&p), random_h(&mut rng));
        let c = generate_sequence(&wrong);
        let h_ls = ls_scalar(&y, &c);
        let got = residual_energy(&y, h_ls, &wrong).unwrap();
        let proj: Complex64 = y.iter().zip(c.chips()).map(|(v, &x)| v * x as f64).sum();
        let want = y.energy() - proj.norm_sqr() / (1u64 << m) as f64;
        assert!((got - want).abs() <= 1e-10 * y.energy());
    }
}

#[test]
fn pipeline_estimate_equals_scalar_ls_on_noisy_input() {
    let m = 8;
    for t in 0..500 {
        let sc = Scenario::draw(m, 1, 1.0, ChannelModel::Rayleigh, 99, t).unwrap();
        let y = synthesize(&sc);
        let det = detect_single(&y).unwrap();
        let ls = ls_scalar(&y, &det.sequence);
        assert!((det.h_hat - ls).norm() <= 1e-12 * (1.0 + ls.norm()));
    }
}

/// Exhaustive maximum-likelihood decision: the ID whose scalar LS fit leaves
/// the least residual. Returns `None` on a near tie.
fn mlse(y: &ComplexSignal, m: usize) -> Option<RmPair> {
    let mut scored: Vec<(f64, RmPair)> = (0..capacity(m))
        .map(|d| {
            let p = pair(m, d);
            let c = generate_sequence(&p);
            let h = ls_scalar(y, &c);
            (residual_energy(y, h, &p).unwrap(), p)
        })
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    if scored[1].0 - scored[0].0 <= 1e-9 * scored[0].0.max(1e-300) {
        return None;
    }
    Some(scored.swap_remove(0).1)
}

#[test]
fn full_width_list_is_maximum_likelihood() {
    let m = 3;
    let params = ListParams::new(vec![4, 2]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n0 in [0.0, 1.0] {
        for d in 0..capacity(m) {
            for _ in 0..25 {
                let y = ComplexSignal::from_sequence(&generate_sequence(&pair(m, d)), random_h(&mut rng));
                let y = if n0 > 0.0 { noisy(&y, n0, &mut rng) } else { y };
                if let Some(best) = mlse(&y, m) {
                    assert_eq!(detect_list(&y, &params).unwrap().pair, best);
                }
            }
        }
    }
}

#[test]
fn width_one_list_is_bit_exact_single() {
    for t in 0..200 {
        let sc = Scenario::draw(7, 1, 2.0, ChannelModel::Rayleigh, 5, t).unwrap();
        let y = synthesize(&sc);
        let a = detect_single(&y).unwrap();
        let b = detect_list(&y, &ListParams::single()).unwrap();
        assert_eq!((a.pair, a.h_hat, a.residual), (b.pair, b.h_hat, b.residual));
    }
}

#[test]
fn positive_scaling_is_equivariant_on_noisy_input() {
    for t in 0..200 {
        let sc = Scenario::draw(8, 1, 3.0, ChannelModel::Rayleigh, 11, t).unwrap();
        let y = synthesize(&sc);
        let a = detect_single(&y).unwrap();
        for k in [0.125, 7.0] {
            let b = detect_single(&y.scaled(k)).unwrap();
            assert_eq!(a.pair, b.pair);
            assert!((b.h_hat - a.h_hat * k).norm() <= 1e-12 * k * (1.0 + a.h_hat.norm()));
        }
    }
}
