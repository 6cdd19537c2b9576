use lavaurs_core::fatou::FatouSolver;
use lavaurs_core::germ::{basin_entry, Germ};
use lavaurs_core::julia::*;
use lavaurs_core::schedule::{phase, BaseOrbit, Observable, SigmaSchedule};
use num_complex::{c64, Complex64};

fn small_grid(px: usize) -> GridSpec {
    GridSpec::default_window(px)
}

#[test]
fn basin_labels_stable_under_doubling_iterations() {
    let q = Germ::quadratic();
    let grid = small_grid(512);
    let a = render_basin(&q, &grid, 2000, 0.25).unwrap();
    let b = render_basin(&q, &grid, 4000, 0.25).unwrap();
    let changed = a.labels.iter().zip(&b.labels).filter(|(x, y)| x != y).count();
    assert!(
        (changed as f64) <= 1e-3 * grid.len() as f64,
        "{changed} labels changed"
    );
}

#[test]
fn basin_label_matches_entry() {
    let q = Germ::quadratic();
    let grid = small_grid(40);
    let bmp = render_basin(&q, &grid, 500, 0.25).unwrap();
    for row in (0..40).step_by(7) {
        for col in (0..40).step_by(5) {
            let w = grid.point(col, row);
            let expect = basin_entry(&q, w, 0.25, 500).entry();
            assert_eq!(bmp.label(col, row) == Label::Basin, expect.is_some());
            if let Some(m) = expect {
                assert_eq!(bmp.value(col, row), m as u32);
            }
        }
    }
}

#[test]
fn escape_oracle_beyond_two() {
    // for w + w^2, |w| > 2 gives |f(w)| >= |w|(|w| - 1) > |w|
    let q = Germ::quadratic();
    let grid = GridSpec::new(c64(0.0, 0.0), 8.0, 8.0, 32, 32).unwrap();
    let bmp = render_basin(&q, &grid, 200, 0.25).unwrap();
    for row in 0..32 {
        for col in 0..32 {
            if grid.point(col, row).norm() > 2.0 {
                assert_eq!(bmp.label(col, row), Label::Escapes);
            }
        }
    }
}

fn julia_mask(q: &Germ, grid: &GridSpec, iter: usize) -> Vec<bool> {
    render_julia(q, grid, iter).unwrap().mask(Label::JuliaNear)
}

#[test]
fn julia_mask_is_hit_at_step_zero() {
    let q = Germ::quadratic();
    let grid = small_grid(96);
    let opts = LavaursRenderOptions {
        u: c64(0.5, 0.0),
        m_max: 2,
        ..Default::default()
    };
    let lav = render_julia_lavaurs(&q, &grid, &opts).unwrap();
    let j = julia_mask(&q, &grid, opts.julia_iter);
    assert!(j.iter().any(|&x| x));
    for (i, &on) in j.iter().enumerate() {
        if on {
            assert_eq!(lav.labels[i], Label::LavaursHit);
            assert_eq!(lav.values[i], 0);
        }
    }
}

#[test]
fn identity_map_reproduces_dilated_julia_set() {
    // L_0 is the identity for the geometric germ; inject it directly
    let q = Germ::quadratic();
    let grid = small_grid(96);
    let opts = LavaursRenderOptions {
        m_max: 3,
        ..Default::default()
    };
    let lav = render_julia_lavaurs_with(&q, &grid, &opts, Ok).unwrap();
    let zero = render_julia_lavaurs_with(
        &q,
        &grid,
        &LavaursRenderOptions { m_max: 0, ..opts },
        Ok,
    )
    .unwrap();
    assert_eq!(lav.mask(Label::LavaursHit), zero.mask(Label::LavaursHit));
    assert!(lav.values.iter().all(|&v| v == 0 || v == 3));
}

#[test]
fn hit_sets_grow_with_m_max() {
    let q = Germ::quadratic();
    let grid = small_grid(64);
    let base = LavaursRenderOptions {
        u: c64(0.3, 0.2),
        m_max: 1,
        ..Default::default()
    };
    let a = render_julia_lavaurs(&q, &grid, &base).unwrap();
    let b = render_julia_lavaurs(&q, &grid, &LavaursRenderOptions { m_max: 2, ..base }).unwrap();
    let (ma, mb) = (a.mask(Label::LavaursHit), b.mask(Label::LavaursHit));
    assert!(ma.iter().zip(&mb).all(|(&x, &y)| !x || y));
    assert!(mb.iter().filter(|&&x| x).count() > ma.iter().filter(|&&x| x).count());
}

#[test]
fn unit_phase_shift_is_one_step_of_q() {
    // L_{u+1} = q o L_u on sampled basin points
    let q = Germ::quadratic();
    let solver = FatouSolver::new(q.clone());
    let u = c64(0.5, 0.1);
    for w in [c64(-0.3, 0.2), c64(-0.6, -0.1), c64(-0.1, 0.35)] {
        let l = solver.lavaurs(u, w).unwrap();
        let l1 = solver.lavaurs(u + 1.0, w).unwrap();
        assert!((l1 - q.evaluate(l).unwrap()).norm() < 1e-7 * (1.0 + l1.norm()));
    }
}

#[test]
fn renders_are_deterministic() {
    let q = Germ::quadratic();
    let grid = small_grid(64);
    let opts = LavaursRenderOptions {
        u: c64(0.5, 0.0),
        ..Default::default()
    };
    let a = render_julia_lavaurs(&q, &grid, &opts).unwrap().to_ppm();
    let b = render_julia_lavaurs(&q, &grid, &opts).unwrap().to_ppm();
    assert_eq!(a, b);
}

#[test]
fn csv_dump_has_one_row_per_pixel() {
    let grid = small_grid(5);
    let bmp = render_basin(&Germ::quadratic(), &grid, 100, 0.25).unwrap();
    let mut out = Vec::new();
    bmp.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 26);
    assert!(text.starts_with("col,row,re,im,label,value"));
}

#[test]
fn non_polynomial_germ_rejected() {
    let grid = small_grid(4);
    assert!(matches!(
        render_basin(&Germ::geometric(), &grid, 10, 0.25),
        Err(JuliaError::NotPolynomial)
    ));
}

#[test]
fn constant_observable_slice_tracks_prediction() {
    let q = Germ::quadratic();
    let grid = small_grid(96);
    let sigma0 = 0.25;
    let a = Observable::Trig {
        mean: c64(std::f64::consts::PI * sigma0, 0.0),
        sin_amp: Complex64::default(),
        cos_amp: Complex64::default(),
    };
    let base = BaseOrbit::rotation(0.1, 0.0);
    let mut dists = Vec::new();
    for n in [50, 200, 800] {
        let s = render_fibered_slice(
            &base,
            &a,
            &q,
            &grid,
            &SliceOptions {
                n,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((s.u_n - c64(sigma0, 0.0)).norm() < 1e-12);
        dists.push(s.distance.unwrap());
    }
    eprintln!("slice distances {dists:?}");
    assert!(dists.windows(2).all(|d| d[1] <= d[0]));
}

#[test]
fn zero_observable_targets_phase_zero() {
    let a = Observable::Polynomial { coeffs: vec![] };
    let grid = small_grid(16);
    let s = render_fibered_slice(
        &BaseOrbit::doubling(1),
        &a,
        &Germ::quadratic(),
        &grid,
        &SliceOptions {
            n: 20,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(s.u_n, Complex64::default());
}

#[test]
fn doubling_driven_phase_matches_quadrature() {
    let a = Observable::Trig {
        mean: c64(0.7, 0.0),
        sin_amp: c64(0.4, 0.0),
        cos_amp: c64(0.0, 0.3),
    };
    let s = SigmaSchedule::orbit_driven(BaseOrbit::doubling(11), a.scaled(1.0 / std::f64::consts::PI));
    let u = phase(&s, 100_000).unwrap().u_n;
    let quad = a.circle_integral().unwrap() / std::f64::consts::PI;
    assert!((u - quad).norm() <= 1e-2, "{u} vs {quad}");
}
