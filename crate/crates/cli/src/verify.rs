//! Verification suites with machine-readable reports.

use ctc_core::clock::{clock_state, evolved_clock, vacuum_clock, ClockSpec};
use ctc_core::dctc::{
    analytic_cv, dctc_clock_probabilities, dctc_populations, ecp_solve, FixedPointQuery,
};
use ctc_core::gates::{circuit_unitary, vacuum_swap, CircuitSpec};
use ctc_core::hilbert::fidelity_pure;
use ctc_core::pctc::{
    pctc_apply, pctc_observables, record_experiment, reduced_operator, ConstraintParams,
};
use ctc_core::Error;

use crate::config::{figure_omegas, parse_config};
use crate::sweep::run_sweep;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Unitarity,
    Fixedpoint,
    Oracle,
    Constraints,
    Figures,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::Unitarity, Suite::Fixedpoint, Suite::Oracle, Suite::Constraints, Suite::Figures];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Unitarity => "unitarity",
            Suite::Fixedpoint => "fixedpoint",
            Suite::Oracle => "oracle",
            Suite::Constraints => "constraints",
            Suite::Figures => "figures",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Unitarity | Suite::Constraints => 1e-12,
            Suite::Fixedpoint | Suite::Oracle => 1e-9,
            Suite::Figures => 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

struct Recorder {
    suite: &'static str,
    tol: f64,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: Suite, tol: f64) -> Self {
        Self { suite: suite.name(), tol, checks: Vec::new() }
    }

    /// Passes when `measured ≤ tol`.
    fn at_most(&mut self, name: String, measured: f64) {
        let passed = measured <= self.tol;
        self.push(name, measured, self.tol, passed);
    }

    fn push(&mut self, name: String, measured: f64, tolerance: f64, passed: bool) {
        self.checks.push(Check { suite: self.suite, name, measured, tolerance, passed });
    }

    fn error(&mut self, name: String, err: Error) {
        self.push(format!("{name} [{err}]"), f64::NAN, self.tol, false);
    }
}

pub fn verify(suite: Suite, tol: Option<f64>) -> Vec<Check> {
    let mut rec = Recorder::new(suite, tol.unwrap_or(suite.default_tolerance()));
    match suite {
        Suite::Unitarity => unitarity(&mut rec),
        Suite::Fixedpoint => fixedpoint(&mut rec),
        Suite::Oracle => oracle(&mut rec),
        Suite::Constraints => constraints(&mut rec),
        Suite::Figures => figures(&mut rec),
    }
    rec.checks
}

fn unitarity(rec: &mut Recorder) {
    for n in 2..=16 {
        let swap = match vacuum_swap::<f64>(n) {
            Ok(s) => s,
            Err(e) => return rec.error(format!("N={n}"), e),
        };
        rec.at_most(format!("vacuum_swap N={n}"), swap.unitarity_defect());
        let clock = ClockSpec::<f64>::unit_tick(n).and_then(|c| c.with_ground_energy(0.41));
        match clock.and_then(|c| circuit_unitary(&CircuitSpec::with_delay_ratio(c, 0.73))) {
            Ok(u) => rec.at_most(
                format!("circuit N={n}"),
                u.unitarity_defect().max(u.co_unitarity_defect()),
            ),
            Err(e) => rec.error(format!("circuit N={n}"), e),
        }
    }
}

fn fixedpoint(rec: &mut Recorder) {
    for n in [2, 3, 5] {
        for omega in [0.0, 0.25, 0.5, 0.75] {
            for ratio in [0.0, 0.5, 1.0, 1.5, 2.0] {
                for (g, g_label) in [(0.0, "0"), (1.0 / 3.0, "1/3"), (1.0, "1")] {
                    let name = format!("N={n} omega={omega} dt={ratio} g={g_label}");
                    let result = ClockSpec::unit_tick(n).and_then(|clock| {
                        let q = FixedPointQuery::new(CircuitSpec::with_delay_ratio(clock, ratio), omega)
                            .with_g(g);
                        q.channel()?.residual(&analytic_cv(&q)?)
                    });
                    match result {
                        Ok(r) => rec.at_most(name, r),
                        Err(e) => rec.error(name, e),
                    }
                }
            }
        }
    }
}

fn dctc_oracle(q: &FixedPointQuery<f64>) -> Result<f64, Error> {
    let sol = ecp_solve(q, 1e-13, 10_000)?;
    let channel = q.channel()?;
    let out = channel.output_map(&sol.state)?;
    let pops = dctc_populations(q)?;
    let probs = dctc_clock_probabilities(q)?;
    let clock = &q.circuit.clock;
    let unevolved = clock_state(clock);
    let orthogonal = evolved_clock(clock, clock.t_perp());
    let mut dev: f64 = 0.0;
    for i in 0..q.circuit.dim() {
        dev = dev.max((sol.state.population(i) - pops.cv[i]).abs());
        dev = dev.max((out.population(i) - pops.output[i]).abs());
    }
    for (numeric, closed) in [
        (sol.state.expectation(&unevolved)?, probs.cv_unevolved),
        (sol.state.expectation(&orthogonal)?, probs.cv_orthogonal),
        (out.expectation(&unevolved)?, probs.out_unevolved),
        (out.expectation(&orthogonal)?, probs.out_orthogonal),
    ] {
        dev = dev.max((numeric - closed).abs());
    }
    Ok(dev)
}

fn pctc_oracle(circuit: &CircuitSpec<f64>, omega: f64) -> Result<f64, Error> {
    let out = pctc_apply(&reduced_operator(circuit), &vacuum_clock(&circuit.clock, omega)?)?;
    let obs = pctc_observables(circuit, omega)?;
    let clock = &circuit.clock;
    let mut dev: f64 = 0.0;
    for (i, p) in obs.populations.iter().enumerate() {
        dev = dev.max((out.amplitude(i).norm_sqr() - p).abs());
    }
    let unevolved = fidelity_pure(&clock_state(clock), &out)?;
    let orthogonal = fidelity_pure(&evolved_clock(clock, clock.t_perp()), &out)?;
    dev = dev.max((unevolved - obs.p_unevolved).abs());
    Ok(dev.max((orthogonal - obs.p_orthogonal).abs()))
}

fn oracle(rec: &mut Recorder) {
    for n in [2, 3, 4] {
        for omega in [0.1, 0.5, 0.8] {
            for ratio in [0.37, 1.3] {
                let circuit = match ClockSpec::unit_tick(n).and_then(|c| c.with_ground_energy(0.2)) {
                    Ok(clock) => CircuitSpec::with_delay_ratio(clock, ratio),
                    Err(e) => return rec.error(format!("N={n}"), e),
                };
                let tag = format!("N={n} omega={omega} dt={ratio}");
                let q = FixedPointQuery::new(circuit, omega).with_g(0.3);
                match dctc_oracle(&q) {
                    Ok(d) => rec.at_most(format!("dctc {tag}"), d),
                    Err(e) => rec.error(format!("dctc {tag}"), e),
                }
                match pctc_oracle(&circuit, omega) {
                    Ok(d) => rec.at_most(format!("pctc {tag}"), d),
                    Err(e) => rec.error(format!("pctc {tag}"), e),
                }
            }
        }
    }
}

fn constraints(rec: &mut Recorder) {
    for n in [2, 3] {
        for p in [1, 2] {
            for q in [0, 1] {
                let tag = format!("N={n} p={p} q={q}");
                let setup = ConstraintParams::new(p, q).and_then(|params| {
                    let circuit = params.circuit(&ClockSpec::unit_tick(n)?)?;
                    Ok((params, circuit))
                });
                let (params, circuit) = match setup {
                    Ok(x) => x,
                    Err(e) => return rec.error(tag, e),
                };
                let w = reduced_operator(&circuit);
                let block = (1..=n).map(|i| w.entry(i, i).norm()).fold(0.0, f64::max);
                let off = (0..=n)
                    .flat_map(|i| (0..=n).filter(move |&j| j != i).map(move |j| (i, j)))
                    .map(|(i, j)| w.entry(i, j).norm())
                    .fold(block, f64::max);
                rec.at_most(format!("reduced clock block {tag}"), off);
                let vac = (w.entry(0, 0) - (1.0 - n as f64)).norm();
                rec.at_most(format!("reduced vacuum entry {tag}"), vac);

                match pctc_apply(&w, &clock_state(&circuit.clock)) {
                    Err(Error::ForbiddenInitialData { norm_sq }) => {
                        rec.push(format!("clock input forbidden {tag}"), norm_sq, rec.tol, true)
                    }
                    Ok(_) => rec.push(format!("clock input forbidden {tag}"), f64::NAN, rec.tol, false),
                    Err(e) => rec.error(format!("clock input forbidden {tag}"), e),
                }

                match record_experiment(&circuit, Some(params)) {
                    Ok(out) => {
                        rec.at_most(format!("record collapse {tag}"), 1.0 - out.record_vacuum_prob);
                        let passed = out.schmidt_rank == 1;
                        rec.push(format!("record schmidt rank {tag}"), out.schmidt_rank as f64, 1.0, passed);
                    }
                    Err(e) => rec.error(format!("record collapse {tag}"), e),
                }
            }
        }
    }
}

fn figures(rec: &mut Recorder) {
    let pctc = parse_config("model=pctc\nN=2").map(|c| run_sweep(&c));
    let dctc = parse_config("model=dctc\nN=2\ng=0.3333333333333333").map(|c| run_sweep(&c));
    let (pctc, dctc) = match (pctc, dctc) {
        (Ok(Ok(p)), Ok(Ok(d))) => (p, d),
        _ => {
            rec.push("figure sweeps".to_string(), f64::NAN, rec.tol, false);
            return;
        }
    };
    let value = |sweep: &crate::sweep::SweepResult, name: &str, dt: f64, omega: f64| {
        sweep
            .series(name)
            .find(|r| (r.dt_over_tperp - dt).abs() < 1e-12 && (r.omega - omega).abs() < 1e-15)
            .and_then(|r| r.value)
            .unwrap_or(f64::NAN)
    };

    rec.at_most(
        "pctc p_unevolved(dt=0, omega=0) = 1".to_string(),
        (value(&pctc, "p_unevolved", 0.0, 0.0) - 1.0).abs(),
    );
    let peak = value(&pctc, "p_orthogonal", 1.0, 0.0);
    rec.at_most("pctc p_orthogonal(dt=1, omega=0) = 0.5".to_string(), (peak - 0.5).abs());
    let others = figure_omegas()
        .into_iter()
        .skip(1)
        .map(|o| value(&pctc, "p_orthogonal", 1.0, o))
        .fold(f64::NEG_INFINITY, f64::max);
    rec.push("pctc p_orthogonal(dt=1) maximal at omega=0".to_string(), others - peak, 0.0, others < peak);

    let g = 1.0 / 3.0;
    let flat = ["cv_unevolved", "cv_orthogonal"]
        .iter()
        .flat_map(|name| dctc.series(name).filter(|r| r.omega == 1.0))
        .map(|r| (r.value.unwrap_or(f64::NAN) - (1.0 - g) / 2.0).abs())
        .fold(0.0, f64::max);
    rec.at_most("dctc cv probabilities flat at omega=1".to_string(), flat);

    let mut pop_dev: f64 = 0.0;
    for omega in figure_omegas() {
        for (name, expected) in [
            ("cv_pop_0", g),
            ("cv_pop_1", (1.0 - g) / 2.0),
            ("out_pop_0", omega),
            ("out_pop_1", (1.0 - omega) / 2.0),
        ] {
            for r in dctc.series(name).filter(|r| r.omega == omega) {
                pop_dev = pop_dev.max((r.value.unwrap_or(f64::NAN) - expected).abs());
            }
        }
    }
    rec.at_most("dctc populations constant".to_string(), pop_dev);

    let quarter = parse_config("model=pctc\nN=2\nomega=0.25\nobservables=populations")
        .map(|c| run_sweep(&c));
    let spread = match quarter {
        Ok(Ok(sweep)) => {
            let v: Vec<f64> = sweep.series("pop_0").filter_map(|r| r.value).collect();
            v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - v.iter().cloned().fold(f64::INFINITY, f64::min)
        }
        _ => f64::NAN,
    };
    rec.push("pctc populations vary with delay".to_string(), spread, 0.01, spread > 0.01);
}

/// Report lines `suite,check,measured,tolerance,status`.
pub fn report_csv(checks: &[Check]) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["suite", "check", "measured", "tolerance", "status"])?;
    for c in checks {
        w.write_record([
            c.suite.to_string(),
            c.name.clone(),
            format!("{:.6e}", c.measured),
            format!("{:.1e}", c.tolerance),
            if c.passed { "pass" } else { "fail" }.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("report is ASCII"))
}
