//! Closed-form parameter sweeps and their CSV serialization.

use std::cmp::Ordering;

use ctc_core::clock::ClockSpec;
use ctc_core::dctc::{dctc_clock_probabilities, dctc_populations, FixedPointQuery};
use ctc_core::gates::CircuitSpec;
use ctc_core::pctc::pctc_observables;
use ctc_core::Error;

use crate::config::{Model, ObservableGroup, RunConfig};

pub const CSV_HEADER: [&str; 6] = ["dt_over_tperp", "omega", "g", "observable", "value", "reason"];

/// Reason recorded on rows whose input is annihilated by the reduced operator.
pub const FORBIDDEN_REASON: &str = "forbidden_initial_data";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub dt_over_tperp: f64,
    pub omega: f64,
    /// `None` for P-CTC rows.
    pub g: Option<f64>,
    pub observable: String,
    /// `None` when the point is forbidden.
    pub value: Option<f64>,
    pub reason: String,
}

impl Row {
    fn order(&self, other: &Self) -> Ordering {
        self.dt_over_tperp
            .total_cmp(&other.dt_over_tperp)
            .then(self.omega.total_cmp(&other.omega))
            .then_with(|| match (self.g, other.g) {
                (Some(a), Some(b)) => a.total_cmp(&b),
                (a, b) => a.is_some().cmp(&b.is_some()),
            })
            .then_with(|| self.observable.cmp(&other.observable))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<Row>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepResult {
    pub fn forbidden_count(&self) -> usize {
        self.rows.iter().filter(|r| r.value.is_none()).count()
    }

    /// Rows matching an observable name, in sweep order.
    pub fn series<'a>(&'a self, observable: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.observable == observable)
    }

    /// RFC 4180 CSV with LF line endings and 17 significant digits.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                num(r.dt_over_tperp),
                num(r.omega),
                r.g.map(num).unwrap_or_default(),
                r.observable.clone(),
                r.value.map(num).unwrap_or_else(|| "NA".to_string()),
                r.reason.clone(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("CSV output is ASCII"))
    }
}

/// Circuits and their `Δt/t⊥` labels for the run.
fn circuits(config: &RunConfig) -> Result<Vec<(f64, CircuitSpec<f64>)>, Error> {
    let clock = ClockSpec::unit_tick(config.levels)?;
    if let Some(params) = config.constrained {
        let circuit = params.circuit(&clock)?;
        return Ok(vec![(circuit.delay_ratio(), circuit)]);
    }
    let clock = clock.with_ground_energy(config.e1)?;
    Ok(config
        .dt_grid
        .values()
        .into_iter()
        .map(|ratio| (ratio, CircuitSpec::with_delay_ratio(clock, ratio)))
        .collect())
}

fn dctc_rows(
    config: &RunConfig,
    ratio: f64,
    circuit: CircuitSpec<f64>,
    omega: f64,
    g: f64,
    rows: &mut Vec<Row>,
) -> Result<(), Error> {
    let query = FixedPointQuery::new(circuit, omega).with_g(g).with_truncation(config.truncation_eps);
    let mut push = |name: String, value: f64| {
        rows.push(Row {
            dt_over_tperp: ratio,
            omega,
            g: Some(g),
            observable: name,
            value: Some(value),
            reason: String::new(),
        })
    };
    for group in &config.observables {
        match group {
            ObservableGroup::Populations => {
                let pops = dctc_populations(&query)?;
                for (i, p) in pops.cv.into_iter().enumerate() {
                    push(format!("cv_pop_{i}"), p);
                }
                for (i, p) in pops.output.into_iter().enumerate() {
                    push(format!("out_pop_{i}"), p);
                }
            }
            ObservableGroup::ClockProbs => {
                let p = dctc_clock_probabilities(&query)?;
                push("out_unevolved".to_string(), p.out_unevolved);
                push("out_orthogonal".to_string(), p.out_orthogonal);
            }
            ObservableGroup::CvProbs => {
                let p = dctc_clock_probabilities(&query)?;
                push("cv_unevolved".to_string(), p.cv_unevolved);
                push("cv_orthogonal".to_string(), p.cv_orthogonal);
            }
        }
    }
    Ok(())
}

fn pctc_names(config: &RunConfig) -> Vec<String> {
    let mut names = Vec::new();
    for group in &config.observables {
        match group {
            ObservableGroup::Populations => {
                names.extend((0..=config.levels).map(|i| format!("pop_{i}")))
            }
            ObservableGroup::ClockProbs => {
                names.push("p_unevolved".to_string());
                names.push("p_orthogonal".to_string());
            }
            ObservableGroup::CvProbs => {}
        }
    }
    names
}

fn pctc_rows(
    config: &RunConfig,
    ratio: f64,
    circuit: CircuitSpec<f64>,
    omega: f64,
    rows: &mut Vec<Row>,
) -> Result<(), Error> {
    let row = |name: String, value: Option<f64>, reason: &str| Row {
        dt_over_tperp: ratio,
        omega,
        g: None,
        observable: name,
        value,
        reason: reason.to_string(),
    };
    match pctc_observables(&circuit, omega) {
        Ok(obs) => {
            for group in &config.observables {
                match group {
                    ObservableGroup::Populations => {
                        for (i, p) in obs.populations.iter().enumerate() {
                            rows.push(row(format!("pop_{i}"), Some(*p), ""));
                        }
                    }
                    ObservableGroup::ClockProbs => {
                        rows.push(row("p_unevolved".to_string(), Some(obs.p_unevolved), ""));
                        rows.push(row("p_orthogonal".to_string(), Some(obs.p_orthogonal), ""));
                    }
                    ObservableGroup::CvProbs => {}
                }
            }
            Ok(())
        }
        Err(Error::ForbiddenInitialData { .. }) => {
            rows.extend(pctc_names(config).into_iter().map(|n| row(n, None, FORBIDDEN_REASON)));
            Ok(())
        }
        Err(e) => Err(e),
    }
}

/// Evaluates the requested closed-form observables over the whole grid.
pub fn run_sweep(config: &RunConfig) -> Result<SweepResult, Error> {
    let mut rows = Vec::new();
    for (ratio, circuit) in circuits(config)? {
        for &omega in &config.omegas {
            match config.model {
                Model::Dctc => {
                    for &g in &config.gs {
                        dctc_rows(config, ratio, circuit, omega, g, &mut rows)?;
                    }
                }
                Model::Pctc => pctc_rows(config, ratio, circuit, omega, &mut rows)?,
            }
        }
    }
    rows.sort_by(Row::order);
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn pctc_special_point() {
        let c = parse_config("model=pctc\nN=2\nomega=0").unwrap();
        let r = run_sweep(&c).unwrap();
        let at = |name: &str| {
            r.series(name).find(|row| (row.dt_over_tperp - 1.0).abs() < 1e-12).unwrap().value.unwrap()
        };
        assert!((at("p_unevolved") - 0.5).abs() < 1e-14);
        assert!((at("p_orthogonal") - 0.5).abs() < 1e-14);
    }

    #[test]
    fn dctc_populations_flat() {
        let c = parse_config("model=dctc\nomega=0.25\ndt_grid=0:2:21\nobservables=populations").unwrap();
        let r = run_sweep(&c).unwrap();
        for name in ["cv_pop_0", "cv_pop_1", "out_pop_0", "out_pop_2"] {
            let values: Vec<f64> = r.series(name).map(|row| row.value.unwrap()).collect();
            assert_eq!(values.len(), 21);
            assert!(values.iter().all(|v| (v - values[0]).abs() < 1e-12), "{name}");
        }
    }

    #[test]
    fn rows_sorted_and_header_fixed() {
        let c = parse_config("model=dctc\nomega=0.5,0.1\ng=0.5,0\ndt_grid=0:1:3").unwrap();
        let r = run_sweep(&c).unwrap();
        assert!(r.rows.windows(2).all(|w| w[0].order(&w[1]) != Ordering::Greater));
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("dt_over_tperp,omega,g,observable,value,reason\n"));
        assert!(!csv.contains('\r'));
        assert_eq!(csv.lines().count(), 1 + 3 * 2 * 2 * 10);
    }

    #[test]
    fn forbidden_rows_marked() {
        let c = parse_config("model=pctc\nconstrained=1,0\nomega=0").unwrap();
        let r = run_sweep(&c).unwrap();
        assert_eq!(r.forbidden_count(), r.rows.len());
        let csv = r.to_csv().unwrap();
        assert!(csv.lines().nth(1).unwrap().ends_with(",NA,forbidden_initial_data"));
        let c = parse_config("model=pctc\nconstrained=1,0\nomega=0.5").unwrap();
        let r = run_sweep(&c).unwrap();
        assert_eq!(r.forbidden_count(), 0);
        assert!((r.series("pop_0").next().unwrap().value.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn number_format_has_seventeen_digits() {
        assert_eq!(num(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(num(0.0), "0.0000000000000000e0");
    }
}
