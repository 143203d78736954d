//! Acceptance checks. One line per criterion; exits non-zero when a check
//! fails that is not listed in `KNOWN_FAILURES`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use evtlab_core::analytic::{analytic_multiplicity, analytic_theta, finite_n_sets, select_q};
use evtlab_core::exec::Execution;
use evtlab_core::interval_algebra::{ArcSet, CircleArc};
use evtlab_core::observables::ObservableSpec;
use evtlab_core::presets;
use evtlab_core::real::{parse_rational, rational_powi, Real};
use evtlab_core::simulator::report::{clusters_csv, series_csv, stats_json};
use evtlab_core::simulator::{
    compare_induced_repp, run_experiment, run_experiment_with, ExperimentOutput, ExperimentPlan, Level, Pattern,
    SeriesMode,
};
use evtlab_core::tails::{compete, numeric_tail_check, tail_verdict, TailType};

/// Criteria whose literal statement does not hold; they still print FAIL.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    9,
    "phi(f(x)) = e^(u/3) is below phi(x) = u + log 3 at u = 4.6196; the ordering holds only for u above 5.7893",
)];

type Check = Result<(bool, String), String>;

fn r(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1() -> Check {
    let (f, spec) = presets::nonperiodic_sqrt2().map_err(err)?;
    let t = analytic_theta(&spec, &f).map_err(err)?;
    Ok((t.theta == r("7/8"), format!("theta = {}", t.theta)))
}

fn c2() -> Check {
    let (f, spec) = presets::nonperiodic_sqrt2().map_err(err)?;
    let m = analytic_multiplicity(&spec, &f, 12).map_err(err)?;
    let mut want = vec![r("6/7"), r("1/7")];
    want.resize(12, r("0"));
    let beyond = (13..=40).all(|k| m.pi_at(k) == Some(r("0")));
    let shown: Vec<String> = m.pi.iter().take(4).map(|v| v.to_string()).collect();
    Ok((m.pi == want && beyond && m.tails.is_empty(), format!("pi = ({}, ...)", shown.join(", "))))
}

fn c3() -> Check {
    let (f, spec) = presets::periodic_1_31().map_err(err)?;
    let t = analytic_theta(&spec, &f).map_err(err)?;
    let m = analytic_multiplicity(&spec, &f, 25).map_err(err)?;
    let mut ok = t.theta == r("13/16");
    for l in 0..=12i64 {
        let s = rational_powi(&r("1/32"), l);
        ok &= m.pi[(2 * l) as usize] == &r("21/26") * &s;
        if l >= 1 {
            ok &= m.pi[(2 * l - 1) as usize] == &r("67/13") * &s;
        }
    }
    let tail = m.tails.first();
    ok &= m.tails.len() == 1 && tail.is_some_and(|t| t.period == 2 && t.ratio == r("1/32"));
    let desc = tail
        .map(|t| format!("tail from k = {} with period {} and ratio {}", t.start, t.period, t.ratio))
        .unwrap_or_else(|| "no tail".into());
    Ok((ok, format!("theta = {}, {desc}", t.theta)))
}

fn c4() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, (f, spec)) in [
        ("non-periodic", presets::nonperiodic_sqrt2().map_err(err)?),
        ("periodic", presets::periodic_1_31().map_err(err)?),
    ] {
        let t = analytic_theta(&spec, &f).map_err(err)?;
        let m = analytic_multiplicity(&spec, &f, 8).map_err(err)?;
        let total = m.total.clone().ok_or("no closed-form total")?;
        let mean = m.mean.clone().ok_or("no closed-form mean")?;
        ok &= total == r("1") && mean == t.theta.recip();
        parts.push(format!("{name}: sum = {total}, mean = {mean}"));
    }
    Ok((ok, parts.join("; ")))
}

fn c5() -> Check {
    let (_, spec) = presets::pattern_3x().map_err(err)?;
    // n mu(U) = tau with mu(U) = 2(e^-u + u^-3): tau = 80 gives e^-u + u^-3 = 0.02.
    let start = Instant::now();
    let u = spec.solve_threshold(2000.0, 80.0).map_err(err)?;
    let took = start.elapsed();
    let target = 4.619613119957849;
    let residual = (-u).exp() + u.powi(-3) - 0.02;
    Ok((
        (u - target).abs() <= 1e-9 && took < Duration::from_millis(10),
        format!("u = {u:.15}, residual {residual:.1e}, {:.2} ms", took.as_secs_f64() * 1e3),
    ))
}

fn c6() -> Check {
    let (f, spec) = presets::nonperiodic_sqrt2().map_err(err)?;
    let mut gaps = Vec::new();
    for u in [10.0, 15.0, 20.0, 25.0] {
        let t = finite_n_sets(&spec, &f, u, 3, 3).map_err(err)?;
        gaps.push((t.theta_n - 0.875).abs());
    }
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    let last = *gaps.last().unwrap();
    Ok((monotone && last < 1e-3, format!("|theta_n - 7/8| = {:?}", gaps.iter().map(|g| format!("{g:.2e}")).collect::<Vec<_>>())))
}

fn main_run() -> Result<(ObservableSpec, ExperimentOutput), String> {
    let (f, spec) = presets::nonperiodic_sqrt2().map_err(err)?;
    let mut plan = ExperimentPlan::new(100_000, Level::Tau(20.0), 2000, 20_240_607);
    plan.q = Some(3);
    let out = run_experiment(&f, &spec, &plan).map_err(err)?;
    Ok((spec, out))
}

fn c7(run: &Result<(ObservableSpec, ExperimentOutput), String>) -> Check {
    let (_, out) = run.as_ref().map_err(Clone::clone)?;
    let s = &out.stats;
    let z_theta = (s.theta_hat - 0.875) / s.theta_se;
    let se = |p: f64| (p * (1.0 - p) / s.clusters as f64).sqrt();
    let z1 = (s.pi(1) - 6.0 / 7.0) / se(6.0 / 7.0);
    let z2 = (s.pi(2) - 1.0 / 7.0) / se(1.0 / 7.0);
    Ok((
        z_theta.abs() <= 3.0 && z1.abs() <= 3.0 && z2.abs() <= 3.0,
        format!(
            "theta_hat = {:.4} (z {z_theta:+.2}), pi_hat(1) = {:.4} (z {z1:+.2}), pi_hat(2) = {:.4} (z {z2:+.2}), {} exceedances",
            s.theta_hat,
            s.pi(1),
            s.pi(2),
            s.exceedances
        ),
    ))
}

fn c8(run: &Result<(ObservableSpec, ExperimentOutput), String>) -> Check {
    let (spec, out) = run.as_ref().map_err(Clone::clone)?;
    let (f, _) = presets::nonperiodic_sqrt2().map_err(err)?;
    let u = out.level;
    let theta_n = finite_n_sets(spec, &f, u, 3, 1).map_err(err)?.theta_n;
    let tau = out.stats.horizon as f64 * spec.tail_measure(u).map_err(err)?;
    let pred = (-theta_n * tau).exp();
    let sigma = (pred * (1.0 - pred) / out.stats.orbits as f64).sqrt();
    let dev = (out.stats.evl_hat - pred).abs();
    Ok((
        dev <= 3.0 * sigma,
        format!(
            "u = {u:.4}, theta_n = {theta_n:.6}, prediction {pred:.3e}, observed {:.3e}, 3 sigma = {:.3e}",
            out.stats.evl_hat,
            3.0 * sigma
        ),
    ))
}

fn c9() -> Check {
    let (f, spec) = presets::pattern_3x().map_err(err)?;
    let u = 4.619613119957849f64;
    let x = 0.25 + (-u).exp() / 3.0;
    let phi_x = spec.evaluate(x);
    let phi_fx = spec.evaluate(f.apply_f64(x));
    let first = (phi_x - (u + 3f64.ln())).abs() < 1e-9 && phi_x > u;
    let second = (phi_fx - (u / 3.0).exp()).abs() < 1e-6 && phi_fx > phi_x;

    let mut plan = ExperimentPlan::new(2000, Level::Value(u), 1, 7);
    plan.series = SeriesMode::FirstOrbit;
    let out = run_experiment(&f, &spec, &plan).map_err(err)?;
    let ascending = out.clusters.iter().filter(|c| c.pattern() == Some(Pattern::AscendingStep)).count();
    Ok((
        first && second && ascending >= 1,
        format!(
            "phi(x) = {phi_x:.4} vs u + log 3 = {:.4}; phi(f(x)) = {phi_fx:.4} (> phi(x): {}); simulated: {} exceedances, {ascending} ascending-step clusters",
            u + 3f64.ln(),
            phi_fx > phi_x,
            out.stats.exceedances
        ),
    ))
}

fn c10() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (want, (f, spec)) in [
        (3, presets::nonperiodic_sqrt2().map_err(err)?),
        (5, presets::periodic_1_31().map_err(err)?),
        (0, presets::typical_point(2).map_err(err)?),
    ] {
        let s = select_q(&spec, &f).map_err(err)?;
        ok &= s.q == want && s.increasing;
        let rs: Vec<String> = s
            .rows
            .iter()
            .map(|row| row.return_times[s.q as usize].map_or("-".into(), |v| v.to_string()))
            .collect();
        parts.push(format!("q = {} with R(A_q) = [{}]", s.q, rs.join(", ")));
    }
    Ok((ok, parts.join("; ")))
}

fn c11() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (target, (f, spec)) in [
        (1.0, presets::two_typical().map_err(err)?),
        (0.75, presets::fixed_plus_typical().map_err(err)?),
    ] {
        let plan = ExperimentPlan::new(100_000, Level::Tau(20.0), 500, 99);
        let s = run_experiment(&f, &spec, &plan).map_err(err)?.stats;
        let dev = (s.theta_hat - target).abs();
        ok &= dev <= 3.0 * s.theta_se;
        parts.push(format!("theta_hat = {:.4} +- {:.4} (target {target})", s.theta_hat, s.theta_se));
    }
    Ok((ok, parts.join("; ")))
}

fn c12() -> Check {
    let fr = compete(&[TailType::gumbel(None), TailType::frechet(r("1/2"))]).map_err(err)?;
    let wb = compete(&[TailType::gumbel(Some(r("1"))), TailType::weibull(r("1/2"), r("1"))]).map_err(err)?;
    let (_, spec) = presets::nonperiodic_sqrt2().map_err(err)?;
    let v = tail_verdict(&spec, &[1e3]).map_err(err)?;
    let direct = numeric_tail_check(&spec, &v.winner, &[1e3]).map_err(err)?;
    let ok = fr == TailType::frechet(r("1/2"))
        && wb == TailType::weibull(r("1/2"), r("1"))
        && v.winner == TailType::frechet(r("2"))
        && direct.max_deviation < 0.01;
    Ok((ok, format!("{fr}; {wb}; ratio law of {} off by {:.1e} at u = 1e3", v.winner, direct.max_deviation)))
}

fn c13() -> Check {
    let f = evtlab_core::dynamics::PiecewiseMap::lsv(0.4).map_err(err)?;
    let spec = ObservableSpec::correlated(
        &f,
        evtlab_core::real::Position::parse("sqrt(2)/2", 128).map_err(err)?,
        None,
        vec![evtlab_core::observables::PointSpec::new(0, evtlab_core::observables::ShapeFn::NegLog)],
        None,
        0.0,
    )
    .map_err(err)?;
    let y = CircleArc::from_f64(0.5, 0.0, 80).map_err(err)?;
    let plan = ExperimentPlan::new(100_000, Level::Tau(10.0), 500, 31);
    let rep = compare_induced_repp(&f, &y, &spec, &plan).map_err(err)?;
    let d = &rep.divergence;
    Ok((
        d.theta_gap < 0.05 && d.tv_pi < 0.05,
        format!(
            "theta_hat {:.4} vs {:.4}, TV(pi) = {:.4}, KS(gaps) = {:.4}",
            rep.original.theta_hat, rep.induced.theta_hat, d.tv_pi, d.ks_gaps
        ),
    ))
}

fn random_set(rng: &mut ChaCha8Rng, p: usize) -> ArcSet {
    let n = rng.gen_range(0..6);
    let arcs: Vec<CircleArc> = (0..n)
        .map(|_| {
            let lo: f64 = rng.gen_range(0.0..1.0);
            let len: f64 = rng.gen_range(1e-6..0.3);
            let mut hi = (lo + len) % 1.0;
            if hi == lo {
                hi = (hi + 1e-3) % 1.0;
            }
            CircleArc::from_f64(lo, hi, p).unwrap()
        })
        .collect();
    ArcSet::normalize(&arcs, p)
}

fn c14() -> Check {
    let p = 80;
    let tol = Real::pow2(-60, p);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut algebra = 0;
    for _ in 0..10_000 {
        let s = random_set(&mut rng, p);
        let t = random_set(&mut rng, p);
        let ie = (&(&s.union(&t).measure() + &s.intersect(&t).measure()) - &(&s.measure() + &t.measure())).abs();
        let dm = s.union(&t).complement() == s.complement().intersect(&t.complement())
            && s.intersect(&t).complement() == s.complement().union(&t.complement());
        let full = s.union(&s.complement()) == ArcSet::full(p);
        if ie <= tol && dm && full {
            algebra += 1;
        }
    }

    let mut region_ok = 0;
    for (f_spec, lo, hi) in [(presets::pattern_3x(), 5.0, 30.0), (presets::nonperiodic_sqrt2(), 8.0, 60.0)] {
        let (_, spec) = f_spec.map_err(err)?;
        for _ in 0..5_000 {
            let u: f64 = rng.gen_range(lo..hi);
            let region = spec.exceedance_region(u).map_err(err)?;
            let prec = region.precision();
            let radii = spec.radii_real(u, prec).map_err(err)?;
            let i = rng.gen_range(0..radii.len());
            let x = if rng.gen_bool(0.2) {
                Real::from_f64(rng.gen_range(0.0..1.0), prec)
            } else {
                let c = spec.points()[i].location.with_precision(prec);
                let step = &Real::from_f64(rng.gen_range(-2.0..2.0), prec) * &radii[i];
                (c.value() + &step).mod_one()
            };
            let inside = region.contains(&x);
            let mut agree = spec.exceeds(&x, u).map_err(err)? == inside;
            // The double-precision path only resolves balls well above rounding.
            if radii[i].to_f64() > 1e-9 {
                agree &= (spec.evaluate(x.to_f64()) > u) == inside;
            }
            if agree {
                region_ok += 1;
            }
        }
    }

    let (f, spec) = presets::nonperiodic_sqrt2().map_err(err)?;
    let mut plan = ExperimentPlan::new(20_000, Level::Tau(10.0), 8, 4);
    plan.series = SeriesMode::AllOrbits;
    let render = |exec| -> Result<String, String> {
        let o = run_experiment_with(&f, &spec, &plan, exec).map_err(err)?;
        Ok(format!("{}{}{}", stats_json(&o.stats), series_csv(&o.series), clusters_csv(&o.clusters)))
    };
    let a = render(Execution::Parallel)?;
    let b = render(Execution::Parallel)?;
    let c = render(Execution::Sequential)?;
    let same = a == b && a == c;

    Ok((
        algebra == 10_000 && region_ok == 10_000 && same,
        format!("set identities {algebra}/10000, evaluate vs region {region_ok}/10000, reruns byte-identical: {same}"),
    ))
}

fn main() -> ExitCode {
    let mut unexpected = 0;
    let mut report = |id: u32, name: &str, started: Instant, res: Check| {
        let took = started.elapsed().as_secs_f64();
        let (pass, detail) = match res {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let known = KNOWN_FAILURES.iter().find(|k| k.0 == id);
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict} {name}: {detail} [{took:.2} s]");
        if !pass {
            match known {
                Some((_, why)) => println!("             known failure: {why}"),
                None => unexpected += 1,
            }
        }
    };

    macro_rules! check {
        ($id:expr, $name:expr, $body:expr) => {{
            let t = Instant::now();
            let res = $body;
            report($id, $name, t, res);
        }};
    }

    check!(1, "exact extremal index, non-periodic", c1());
    check!(2, "exact multiplicity, non-periodic", c2());
    check!(3, "exact extremal index and multiplicity, periodic", c3());
    check!(4, "multiplicity sums", c4());
    check!(5, "threshold solver", c5());
    check!(6, "oracle convergence", c6());
    let t = Instant::now();
    let run = main_run();
    let run_time = t.elapsed();
    check!(7, "Monte Carlo extremal index", {
        let res = c7(&run);
        res.map(|(ok, d)| (ok, format!("{d}; run took {:.1} s", run_time.as_secs_f64())))
    });
    check!(8, "extreme value law", c8(&run));
    check!(9, "cluster pattern", c9());
    check!(10, "q selection", c10());
    check!(11, "uncorrelated maxima", c11());
    check!(12, "tail competition", c12());
    check!(13, "induced map equivalence", c13());
    check!(14, "property suites", c14());

    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    }
}
