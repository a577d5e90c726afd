use std::time::Instant;

use cat0lab::dynamics::{
    dense_orbit_construct, fixed_pair_atlas, ping_pong_construct, GeneratedGroup, ProductOpen,
};
use cat0lab::h2::{mobius_conjugate, Mobius};
use cat0lab::isometry::Isometry;
use cat0lab::tol::Tolerances;
use cat0lab::tree::Word;

fn scaling_pair() -> (Isometry, Isometry) {
    let g = Mobius::new(2.0, 0.0, 0.0, 0.5).unwrap();
    let h = mobius_conjugate(&[1.0, 1.0, 1.0, -1.0], &g).unwrap();
    (Isometry::H2(g), Isometry::H2(h))
}

#[test]
fn timing_lfree6() {
    let (g, h) = scaling_pair();
    let tol = Tolerances::default();
    let t0 = Instant::now();
    let cert = ping_pong_construct(&g, &h, 3, 6, &tol).unwrap();
    println!(
        "H2 l_free=6: {} words, pass={}, {:.2?}",
        cert.words.len(),
        cert.pass(&tol),
        t0.elapsed()
    );

    let a = Isometry::Tree(Word::parse("a").unwrap());
    let b = Isometry::Tree(Word::parse("b").unwrap());
    let t0 = Instant::now();
    let cert = ping_pong_construct(&a, &b, 3, 6, &tol).unwrap();
    println!(
        "tree l_free=6: {} words, pass={}, {:.2?}",
        cert.words.len(),
        cert.pass(&tol),
        t0.elapsed()
    );
}

#[test]
fn timing_dense_orbit_n20() {
    let (g, h) = scaling_pair();
    let tol = Tolerances::default();
    let cert = ping_pong_construct(&g, &h, 1, 1, &tol).unwrap();
    let group = GeneratedGroup::new(vec![
        ("G".into(), cert.gen_g.clone()),
        ("H".into(), cert.gen_h.clone()),
    ])
    .unwrap();
    let atlas = fixed_pair_atlas(&group, 4, &[], &tol).unwrap();
    let frame = cert.cantor_frame();
    let b = &cert.frame.balls;
    // 20 targets cycling over factor-disjoint ball pairs.
    let idx: [(usize, usize); 4] = [(0, 1), (2, 3), (1, 2), (3, 0)];
    let targets: Vec<ProductOpen> = (0..20)
        .map(|i| {
            let (p, q) = idx[i % 4];
            ProductOpen::new(b[p].clone(), b[q].clone())
        })
        .collect();
    let t0 = Instant::now();
    let rep = dense_orbit_construct(&group, &atlas, Some(&frame), &targets, 3).unwrap();
    println!(
        "H2 dense orbit N=20: pass={} failed_at={:?} {:.2?}",
        rep.pass,
        rep.failed_at,
        t0.elapsed()
    );
    for v in rep.visits.iter().take(20) {
        println!("  visit {}: {} (len {})", v.index, v.text, v.word.len());
    }

    let a = Isometry::Tree(Word::parse("a").unwrap());
    let bb = Isometry::Tree(Word::parse("b").unwrap());
    let cert = ping_pong_construct(&a, &bb, 1, 1, &tol).unwrap();
    let group = GeneratedGroup::new(vec![
        ("A".into(), cert.gen_g.clone()),
        ("B".into(), cert.gen_h.clone()),
    ])
    .unwrap();
    let atlas = fixed_pair_atlas(&group, 3, &[], &tol).unwrap();
    let frame = cert.cantor_frame();
    let b = &cert.frame.balls;
    let targets: Vec<ProductOpen> = (0..20)
        .map(|i| {
            let (p, q) = idx[i % 4];
            ProductOpen::new(b[p].clone(), b[q].clone())
        })
        .collect();
    let t0 = Instant::now();
    let rep = dense_orbit_construct(&group, &atlas, Some(&frame), &targets, 3).unwrap();
    println!(
        "tree dense orbit N=20: pass={} failed_at={:?} {:.2?}",
        rep.pass,
        rep.failed_at,
        t0.elapsed()
    );
}
