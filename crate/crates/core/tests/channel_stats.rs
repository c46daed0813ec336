use rm_access::channel::{ChannelModel, Scenario};
use rm_access::{synthesize, Complex64, UserId};

#[test]
fn rayleigh_draws_have_unit_variance() {
    let n = 100_000;
    let (mut re2, mut im2, mut cross) = (0.0, 0.0, 0.0);
    for t in 0..n {
        let sc = Scenario::draw(4, 1, 1.0, ChannelModel::Rayleigh, 3, t).unwrap();
        let h = sc.channels()[0];
        re2 += h.re * h.re;
        im2 += h.im * h.im;
        cross += h.re * h.im;
    }
    let n = n as f64;
    assert!(((re2 + im2) / n - 1.0).abs() < 0.03);
    assert!((re2 / n - 0.5).abs() < 0.015);
    assert!((im2 / n - 0.5).abs() < 0.015);
    assert!((cross / n).abs() < 0.01);
}

#[test]
fn noise_is_white() {
    let sc = Scenario::new(16, vec![], vec![], 1.0, 8, 0).unwrap();
    let y = synthesize(&sc);
    let r0: f64 = y.iter().map(|v| v.norm_sqr()).sum();
    for lag in 1..=16 {
        let r: Complex64 = y.iter().zip(&y[lag..]).map(|(a, b)| a * b.conj()).sum();
        assert!(r.norm() / r0 <= 0.02, "lag {lag}: {}", r.norm() / r0);
    }
}

#[test]
fn superposition_is_linear_given_shared_noise() {
    let m = 8;
    let (a, b) = (UserId::new(1234, m).unwrap(), UserId::new(99_999, m).unwrap());
    let (ha, hb) = (Complex64::new(0.3, 0.9), Complex64::new(-1.1, 0.2));
    let make = |ids: Vec<UserId>, h: Vec<Complex64>| synthesize(&Scenario::new(m, ids, h, 0.2, 77, 5).unwrap());
    let both = make(vec![a, b], vec![ha, hb]);
    let only_a = make(vec![a], vec![ha]);
    let only_b = make(vec![b], vec![hb]);
    let noise = make(vec![], vec![]);
    for j in 0..both.len() {
        let want = only_a[j] + only_b[j] - noise[j];
        assert!((both[j] - want).norm() < 1e-12);
    }
}

#[test]
fn trials_use_disjoint_streams() {
    let a = Scenario::draw(8, 3, 0.5, ChannelModel::Rayleigh, 1, 0).unwrap();
    let b = Scenario::draw(8, 3, 0.5, ChannelModel::Rayleigh, 1, 1).unwrap();
    let c = Scenario::draw(8, 3, 0.5, ChannelModel::Rayleigh, 2, 0).unwrap();
    assert_ne!(a.channels(), b.channels());
    assert_ne!(a.channels(), c.channels());
    assert_ne!(synthesize(&a), synthesize(&b));
}
