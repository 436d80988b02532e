mod common;

use helpabp::cutmatrix::{cut_matrix, decompose};
use helpabp::format;
use helpabp::hardgen::{
    build_obstruction_set, generate_hard, polynomial_matches, verify_certificate, HelpSet, Solver,
};
use helpabp::linalg::{Field, Subspace};
use helpabp::ncpoly::NCPoly;
use helpabp::rmp::{min_span_distance, DistanceMode, RemoteInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn homogeneous_helps(rng: &mut ChaCha8Rng, f: &Field, n: usize, d: usize) -> Vec<NCPoly> {
    (0..rng.gen_range(1..=3))
        .map(|_| {
            let e = rng.gen_range(1..=d);
            let terms = rng.gen_range(1..=3);
            random_poly(rng, f, n, &[e], terms)
        })
        .collect()
}

/// Every homogeneous program over `H` has its middle cut matrix within rank
/// distance `size` of `span(𝒜)`, so one smaller than `claimed_r` never
/// computes the generated polynomial.
#[test]
fn small_programs_stay_near_the_obstruction_span() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut compared = 0;
    for round in 0..120 {
        let p = if round % 2 == 0 { 2 } else { 3 };
        let f = Field::new(p).unwrap();
        let n = rng.gen_range(2..=3);
        let d = if n == 2 && round % 3 == 0 { 4 } else { 2 };
        let polys = homogeneous_helps(&mut rng, &f, n, d);
        let helps = HelpSet::new(&f, n, polys.clone()).unwrap();
        let obs = build_obstruction_set(&helps, d).unwrap();
        let big_n = n.pow(d as u32 / 2);
        let inst = RemoteInstance::new(&f, big_n, &obs.matrices).unwrap();
        let span = inst.span();
        let hard = generate_hard(&helps, d, Solver::Simple).ok();

        for _ in 0..4 {
            let extra = rng.gen_range(0..=4);
            let a = random_layered_abp(&mut rng, &f, n, &polys, d, extra);
            let g = a.evaluate().unwrap();
            let size = a.size();
            let mg = cut_matrix_of(&g, n, d);
            if let Some(h) = &hard {
                if size < h.certificate.claimed_r {
                    assert!(g != h.f, "a program of size {size} computed the hard polynomial");
                    compared += 1;
                }
            }

            let Ok(dec) = decompose(&a, d / 2) else {
                assert!(g.is_zero());
                continue;
            };
            let m_prime = &dec.m_prime.base;
            assert!(rank_mod(&mat_rows(m_prime), p as u32) <= size);
            let diff = mg.sub(m_prime).unwrap();
            assert!(span.contains(&diff.flatten()).unwrap(), "M(g) - M' outside span(A)");

            if p.pow(inst.k() as u32) <= 1 << 16 {
                let sd = min_span_distance(&mg, &inst, DistanceMode::Exhaustive).unwrap();
                assert!(sd.distance <= size);
            }
        }
    }
    assert!(compared > 0);
}

fn cut_matrix_of(g: &NCPoly, n: usize, d: usize) -> helpabp::linalg::Mat {
    if g.is_zero() {
        let side = n.pow(d as u32 / 2);
        return helpabp::linalg::Mat::zeros(g.field(), side, side);
    }
    cut_matrix(g, d / 2).unwrap().base
}

#[test]
fn certificate_survives_files() {
    let f = Field::new(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let polys = vec![random_poly(&mut rng, &f, 3, &[4], 3), random_poly(&mut rng, &f, 3, &[1, 3], 3)];
    let helps = HelpSet::new(&f, 3, polys).unwrap();
    let hard = generate_hard(&helps, 4, Solver::Simple).unwrap();
    let text = format::write_certificate(&hard.certificate);
    let back = format::parse_certificate(&text).unwrap();
    assert_eq!(back, hard.certificate);
    assert_eq!(format::write_certificate(&back), text);
    assert!(back.matches_helps(&helps));

    let helps_text = format::write_helps(helps.field(), helps.n(), helps.polys());
    let (hf, hn, hp) = format::parse_helps(&helps_text).unwrap();
    assert!(back.matches_helps(&HelpSet::new(&hf, hn, hp).unwrap()));

    let poly = format::parse_ncpoly(&format::write_ncpoly(&hard.f)).unwrap();
    assert!(polynomial_matches(&poly, &back).unwrap());
    let v = verify_certificate(&back, DistanceMode::Exhaustive).unwrap();
    assert!(v.holds && v.exact);
    assert!(Subspace::span(&f, 81, &back.obstruction.iter().map(|m| m.flatten()).collect::<Vec<_>>())
        .unwrap()
        .dim()
        == back.k());
}

#[test]
fn generation_is_deterministic() {
    let f = Field::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let polys = homogeneous_helps(&mut rng, &f, 2, 4);
    let helps = HelpSet::new(&f, 2, polys).unwrap();
    let a = generate_hard(&helps, 4, Solver::Simple);
    let b = generate_hard(&helps, 4, Solver::Simple);
    match (a, b) {
        (Ok(a), Ok(b)) => {
            assert_eq!(format::write_certificate(&a.certificate), format::write_certificate(&b.certificate));
            assert_eq!(format::write_ncpoly(&a.f), format::write_ncpoly(&b.f));
        }
        (Err(a), Err(b)) => assert_eq!(a.to_string(), b.to_string()),
        _ => panic!("runs disagree"),
    }
}
