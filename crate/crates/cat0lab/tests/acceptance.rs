//! Acceptance suite: every criterion below runs at its stated tolerance and
//! prints one pass/fail line. Run with `cargo test --test acceptance --
//! --nocapture` to see the lines for passing criteria too.

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::process::Command;
use std::time::Instant;

use cat0lab_core::audit::{
    check_busemann, check_cat0, check_convex_structure, check_p_convexity, estimate_uc_modulus,
    AuditSpec, ModulusProbe, Order,
};
use cat0lab_core::map::LipschitzMap;
use cat0lab_core::qt::{check_two_map_bound, compute_zt, QtConfig};
use cat0lab_core::scheme::{
    audit_monotone, audit_step_bound, compute_rho, run_scheme, suggest_blend, MapSchedule,
    ScheduleConfig, TSchedule,
};
use cat0lab_core::{Payload, Point, SpaceModel};

fn criterion(n: usize, desc: &str, body: impl FnOnce() + UnwindSafe) {
    match catch_unwind(body) {
        Ok(()) => println!("[acceptance] criterion {n:02}: PASS - {desc}"),
        Err(e) => {
            println!("[acceptance] criterion {n:02}: FAIL - {desc}");
            resume_unwind(e);
        }
    }
}

fn star3() -> SpaceModel {
    SpaceModel::metric_tree(
        vec!["c".into(), "a".into(), "b".into(), "e".into()],
        vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)],
    )
    .unwrap()
}

fn spec(p: Order, samples: usize, seed: u64, tol: f64) -> AuditSpec {
    AuditSpec::new(p, samples, seed, tol)
}

#[test]
fn criterion_01_euclidean_cat0_identity() {
    criterion(1, "CAT(0) comparison holds with equality on euclidean:2/5", || {
        let start = Instant::now();
        for dim in [2, 5] {
            let space = SpaceModel::euclidean(dim).unwrap();
            let rep = check_cat0(&space, &spec(Order::Finite(2.0), 10_000, 42, 1e-9)).unwrap();
            assert_eq!(rep.checked, 10_000);
            assert!(
                rep.worst_residual >= -1e-9 && rep.max_residual <= 1e-9,
                "dim {dim}: residual range [{}, {}]",
                rep.worst_residual,
                rep.max_residual
            );
        }
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    });
}

#[test]
fn criterion_02_curved_models_cat0() {
    criterion(2, "CAT(0) inequality on disk and tree:star3 with a strictness witness", || {
        let start = Instant::now();
        let disk = SpaceModel::poincare_disk();
        let rep = check_cat0(&disk, &spec(Order::Finite(2.0), 10_000, 42, 1e-7)).unwrap();
        assert!(rep.worst_residual >= -1e-7, "disk worst {}", rep.worst_residual);
        assert!(rep.max_residual > 1e-3, "disk strictness {}", rep.max_residual);

        let tree = star3();
        let rep = check_cat0(&tree, &spec(Order::Finite(2.0), 10_000, 42, 1e-7)).unwrap();
        assert!(rep.worst_residual >= -1e-7, "tree worst {}", rep.worst_residual);

        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    });
}

#[test]
fn criterion_03_convexity_properties() {
    criterion(3, "p-convexity, Busemann and convex-structure audits on all models", || {
        for space in [SpaceModel::euclidean(2).unwrap(), SpaceModel::poincare_disk(), star3()] {
            let rep =
                check_p_convexity(&space, &spec(Order::Finite(2.0), 10_000, 7, 1e-7)).unwrap();
            assert!(rep.passed, "p_convexity worst {}", rep.worst_residual);
            for p in [1.0, 2.0] {
                let rep =
                    check_busemann(&space, &spec(Order::Finite(p), 10_000, 7, 1e-7), false)
                        .unwrap();
                assert!(rep.passed, "busemann p={p} worst {}", rep.worst_residual);
            }
            let rep =
                check_convex_structure(&space, &spec(Order::Finite(2.0), 10_000, 7, 1e-7))
                    .unwrap();
            assert!(rep.passed, "convex_structure worst {}", rep.worst_residual);
        }
    });
}

#[test]
fn criterion_04_uniform_convexity_modulus() {
    criterion(4, "modulus estimate matches the closed form 1 - sqrt(3)/2", || {
        let start = Instant::now();
        let space = SpaceModel::euclidean(2).unwrap();
        let probe = ModulusProbe {
            epsilon: 1.0,
            r: 1.0,
            estimated_delta: 0.0,
        };
        let out = estimate_uc_modulus(
            &space,
            &probe,
            Order::Finite(1.0),
            &spec(Order::Finite(1.0), 100_000, 11, 1e-9),
        )
        .unwrap();
        let expected = 1.0 - 3.0_f64.sqrt() / 2.0;
        assert!(
            (out.estimated_delta - expected).abs() <= 0.02,
            "delta {} vs {expected}",
            out.estimated_delta
        );
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");

        // Independent grid oracle for the closed form: z at the origin
        // (translation invariance), x and y on a coordinate grid.
        let mut sup: f64 = 0.0;
        let k = 40;
        let grid = |i: usize| -1.0 + 2.0 * i as f64 / (k - 1) as f64;
        for xi in 0..k {
            for xj in 0..k {
                let (ax, ay) = (grid(xi), grid(xj));
                if ax * ax + ay * ay > 1.0 {
                    continue;
                }
                for yi in 0..k {
                    for yj in 0..k {
                        let (bx, by) = (grid(yi), grid(yj));
                        if bx * bx + by * by > 1.0 {
                            continue;
                        }
                        let sep = ((ax - bx) * (ax - bx) + (ay - by) * (ay - by)).sqrt();
                        if sep < 1.0 {
                            continue;
                        }
                        let (mx, my) = ((ax + bx) / 2.0, (ay + by) / 2.0);
                        sup = sup.max((mx * mx + my * my).sqrt());
                    }
                }
            }
        }
        let oracle_delta = 1.0 - sup;
        assert!(
            (oracle_delta - expected).abs() <= 0.02,
            "grid oracle {oracle_delta} vs closed form {expected}"
        );
    });
}

#[test]
fn criterion_05_two_map_bound() {
    criterion(5, "two-map squared bound over random tuples and the equality witness", || {
        use rand::SeedableRng;
        let spaces = [SpaceModel::euclidean(2).unwrap(), SpaceModel::poincare_disk(), star3()];
        for space in &spaces {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
            let anchor_s = space.sample(&mut rng);
            let anchor_t = space.sample(&mut rng);
            for k in [0.3, 0.7, 1.0] {
                let map_s = LipschitzMap::contraction(anchor_s.clone(), k).unwrap();
                let map_t = LipschitzMap::contraction(anchor_t.clone(), k).unwrap();
                for t in [0.0, 0.25, 0.5, 1.0] {
                    let cfg = QtConfig::new(t, map_s.clone(), map_t.clone()).unwrap();
                    for _ in 0..1_000 {
                        let p = space.sample(&mut rng);
                        let q = space.sample(&mut rng);
                        let x = space.sample(&mut rng);
                        let y = space.sample(&mut rng);
                        let rec = check_two_map_bound(space, &cfg, &p, &q, &x, &y).unwrap();
                        assert!(
                            rec.min_residual() >= -1e-7,
                            "K {k} t {t}: residual {}",
                            rec.min_residual()
                        );
                    }
                }
            }
        }

        // Hand-derived equality case.
        let line = SpaceModel::euclidean(1).unwrap();
        let cfg = QtConfig::new(0.5, LipschitzMap::identity(), LipschitzMap::identity()).unwrap();
        let pt = |v: f64| line.euclidean_point(vec![v]).unwrap();
        let rec =
            check_two_map_bound(&line, &cfg, &pt(0.0), &pt(1.0), &pt(0.0), &pt(1.0)).unwrap();
        assert!((rec.lhs - 1.0).abs() <= 1e-12 && (rec.rhs - 1.0).abs() <= 1e-12);
    });
}

#[test]
fn criterion_06_decay_rate() {
    criterion(6, "blended distances decay geometrically under strict contractions", || {
        let line = SpaceModel::euclidean(1).unwrap();
        let pt = |v: f64| line.euclidean_point(vec![v]).unwrap();
        let c = LipschitzMap::contraction(pt(0.0), 0.5).unwrap();
        let cfg = QtConfig::new(0.5, c.clone(), c).unwrap();
        let rep = cat0lab_core::qt::check_decay(
            &line,
            &cfg,
            &pt(0.0),
            &pt(1.0),
            &pt(0.0),
            &pt(1.0),
            50,
            1e-9,
        )
        .unwrap();
        assert!(rep.passed && rep.final_distance <= 1e-9, "final {}", rep.final_distance);

        // Least-squares slope of ln(d_n) against n.
        let pts: Vec<(f64, f64)> = rep
            .records
            .iter()
            .filter(|r| r.lhs > 0.0)
            .map(|r| (r.n as f64, r.lhs.sqrt().ln()))
            .collect();
        let n = pts.len() as f64;
        let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(
            slope <= 0.5_f64.ln() + 0.05,
            "slope {slope} vs {}",
            0.5_f64.ln() + 0.05
        );
    });
}

#[test]
fn criterion_07_blended_fixed_points() {
    criterion(7, "z_t = t p* + (1-t) y* for S x = x/2 + 2, T x = x/2", || {
        let line = SpaceModel::euclidean(1).unwrap();
        let pt = |v: f64| line.euclidean_point(vec![v]).unwrap();
        let s = LipschitzMap::affine(&line, 0.5, &[2.0]).unwrap();
        let t_map = LipschitzMap::contraction(pt(0.0), 0.5).unwrap();

        for (t, expect) in [(0.0, 0.0), (0.5, 2.0), (1.0, 4.0)] {
            let cfg = QtConfig::new(t, s.clone(), t_map.clone()).unwrap();
            let out = compute_zt(&line, &cfg, &pt(0.0), &pt(1.0), 1e-12, 1_000).unwrap();
            assert!(
                line.distance(&out.z, &pt(expect)).unwrap() <= 1e-9,
                "z_{t} = {:?}",
                out.z
            );
        }
        for i in 1..=9 {
            let t = i as f64 / 10.0;
            let cfg = QtConfig::new(t, s.clone(), t_map.clone()).unwrap();
            let out = compute_zt(&line, &cfg, &pt(0.0), &pt(1.0), 1e-12, 1_000).unwrap();
            let dpy = line
                .distance(&out.p_star.point, &out.y_star.point)
                .unwrap();
            let dy = line.distance(&out.z, &out.y_star.point).unwrap();
            assert!((dy - t * dpy).abs() <= 1e-9, "t {t}: |z - y*| = {dy}");
        }
    });
}

#[test]
fn criterion_08_scheme_trajectory_oracle() {
    criterion(8, "canonical scheme run reproduces hand-computed certificates", || {
        let line = SpaceModel::euclidean(1).unwrap();
        let pt = |v: f64| line.euclidean_point(vec![v]).unwrap();
        let c = LipschitzMap::contraction(pt(0.0), 0.5).unwrap();
        let cfg = ScheduleConfig {
            ts: TSchedule::Constant(0.5),
            s_seq: MapSchedule::Constant(c.clone()),
            t_seq: MapSchedule::Constant(c),
            n_steps: 10,
            x0: pt(1.0),
            x1: pt(1.0),
            stop_tol: 1e-15,
        };
        let trace = run_scheme(&line, &cfg).unwrap();
        let coord = |p: &Point| -> f64 {
            let Payload::Euclidean(c) = p.payload() else { unreachable!() };
            c[0]
        };
        assert!((coord(&trace.points[2]) - 0.5).abs() <= 1e-12);
        assert!((coord(&trace.points[3]) - 0.375).abs() <= 1e-12);
        assert!((coord(&trace.points[4]) - 0.21875).abs() <= 1e-12);
        assert!((trace.thetas[1].unwrap() - 1.0).abs() <= 1e-12);
        assert!((trace.rhos[1].unwrap() - 0.25).abs() <= 1e-12);

        let sd = &trace.step_dists;
        let r0 = trace.rhos[1].unwrap() * (sd[1] * sd[1]).max(sd[0] * sd[0]) - sd[2] * sd[2];
        assert!((r0 - 0.046875).abs() <= 1e-12, "step residual {r0}");
        assert!(audit_step_bound(&trace, 1e-9).unwrap().passed);

        let mono = audit_monotone(&trace, 1e-9).unwrap();
        assert!(mono.passed && mono.strict, "{mono:?}");
    });
}

#[test]
fn criterion_09_suggest_blend_oracle() {
    criterion(9, "blend interval endpoint matches the quadratic root", || {
        let (k_s, k_t, th) = (2.0, 0.5, 2.0);
        let out = suggest_blend(k_s, k_t, th, false).unwrap();
        assert_eq!(out.len(), 1);
        let iv = out[0];
        let oracle = (-0.5 + 10.0_f64.sqrt()) / 6.5;
        assert!((iv.hi - oracle).abs() <= 1e-9, "hi {} vs {oracle}", iv.hi);
        for i in 1..100 {
            let t = iv.lo + (iv.hi - iv.lo) * i as f64 / 100.0;
            assert!(compute_rho(t, k_s, k_t, th) <= 1.0, "rho({t}) > 1");
        }
        assert!(compute_rho(iv.hi + 1e-3, k_s, k_t, th) > 1.0);
    });
}

#[test]
fn criterion_10_cli_contract() {
    criterion(10, "CLI determinism and the 0/1/2 exit-code contract", || {
        let bin = env!("CARGO_BIN_EXE_cat0lab");
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("run.json");
        std::fs::write(
            &config,
            r#"{
                "space": "euclidean:1",
                "ks": 0.5, "kt": 0.5, "t": 0.5, "steps": 40, "seed": 7,
                "x0": {"euclidean": [1.0]}, "x1": {"euclidean": [1.0]}
            }"#,
        )
        .unwrap();

        let mut outputs = Vec::new();
        for run in ["a", "b"] {
            let out = dir.path().join(run);
            let status = Command::new(bin)
                .args(["iterate", "--config"])
                .arg(&config)
                .arg("--out")
                .arg(&out)
                .status()
                .unwrap();
            assert_eq!(status.code(), Some(0), "iterate run {run}");
            outputs.push(std::fs::read(out.join("trace.csv")).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "trace.csv bytes differ between runs");

        // Exit 0: a passing audit.
        let status = Command::new(bin)
            .args([
                "audit",
                "--space",
                "euclidean:2",
                "--check",
                "cat0",
                "--samples",
                "2000",
                "--seed",
                "42",
            ])
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));

        // Exit 1: a deliberately mislabelled declared constant.
        let status = Command::new(bin)
            .args([
                "bounds", "--check", "two_map", "--space", "euclidean:2", "--ks", "0.9",
                "--ks-declared", "0.1", "--kt", "0.5", "--tuples", "50", "--seed", "1",
            ])
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(1));

        // Exit 2: malformed config.
        let broken = dir.path().join("broken.json");
        std::fs::write(&broken, "{ not json").unwrap();
        let status = Command::new(bin)
            .args(["iterate", "--config"])
            .arg(&broken)
            .stderr(std::process::Stdio::null())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(2));
    });
}
