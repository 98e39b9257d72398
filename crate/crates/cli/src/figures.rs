//! Sweep definitions that reproduce the figure curves.

use fama_core::netmodel::{NetworkConfig, Scheme};
use serde::Serialize;

use crate::sweep::{Axis, DistanceRule, Method, SweepSpec};

pub const FIGURES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

/// One output file: a single scheme and method along one axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub spec: SweepSpec,
}

const UNEQUAL: [f64; 4] = [200.0, 400.0, 600.0, 800.0];

fn tag(s: Scheme) -> &'static str {
    match s {
        Scheme::FFama => "f_fama",
        Scheme::SFama => "s_fama",
        Scheme::NoiseLimited => "noise",
    }
}

fn range(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(f64::from).collect()
}

struct Builder {
    trials: u64,
    seed: u64,
    curves: Vec<Curve>,
}

impl Builder {
    fn add(
        &mut self,
        suffix: &str,
        base: &NetworkConfig,
        axis: Axis,
        values: &[f64],
        schemes: &[Scheme],
        methods: &[Method],
    ) {
        for &s in schemes {
            for &m in methods {
                let name = format!("{}_{}{}", tag(s), m.as_str().to_ascii_lowercase(), suffix);
                self.curves.push(Curve {
                    name,
                    spec: SweepSpec {
                        base: base.clone(),
                        axis,
                        values: values.to_vec(),
                        schemes: vec![s],
                        methods: vec![m],
                        trials: self.trials,
                        seed: self.seed,
                        distance_rule: DistanceRule::Equal,
                    },
                });
            }
        }
    }
}

/// Curves of the named figure, or None for an unknown name.
pub fn figure_curves(name: &str, trials: u64, seed: u64) -> Option<Vec<Curve>> {
    let mut b = Builder {
        trials,
        seed,
        curves: Vec::new(),
    };
    let both = [Method::Mc, Method::Analytic];
    let fs = [Scheme::FFama, Scheme::SFama];
    match name {
        // outage against the SIR threshold, unequal distances, K = 10
        "fig2" => {
            let base = NetworkConfig {
                distances: UNEQUAL.to_vec(),
                ..Default::default()
            };
            let grid = [
                1.0, 2.0, 5.0, 10.0, 20.0, 30.0, 50.0, 70.0, 100.0, 150.0, 200.0, 300.0, 500.0,
                1000.0,
            ];
            b.add("", &base, Axis::Threshold, &grid, &fs, &both);
        }
        // outage against N at K = 2 for two thresholds
        "fig3" => {
            for gamma in [14.0, 18.0] {
                let base = NetworkConfig {
                    n_ports: 2,
                    sir_threshold_f: gamma,
                    sir_threshold_s: gamma,
                    distances: UNEQUAL.to_vec(),
                    ..Default::default()
                };
                b.add(
                    &format!("_gamma{gamma}"),
                    &base,
                    Axis::N,
                    &range(1, 8),
                    &fs,
                    &[Method::Mc],
                );
            }
        }
        // outage against K for several N, with fixed-antenna and
        // noise-limited companions
        "fig4" => {
            let ks = [
                1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 25.0, 30.0,
            ];
            for n in 1..=4 {
                let base = NetworkConfig {
                    n_bs_antennas: n,
                    ..Default::default()
                };
                b.add(&format!("_n{n}"), &base, Axis::K, &ks, &fs, &both);
            }
            let fixed = NetworkConfig {
                n_ports: 1,
                ..Default::default()
            };
            b.add(
                "_fixed_antenna",
                &fixed,
                Axis::N,
                &range(1, 40),
                &fs,
                &[Method::Analytic],
            );
            b.add(
                "_fixed_antenna",
                &fixed,
                Axis::N,
                &range(1, 16),
                &fs,
                &[Method::Mc],
            );
            for n in 1..=6 {
                let base = NetworkConfig {
                    n_bs_antennas: n,
                    ..Default::default()
                };
                b.add(
                    &format!("_n{n}"),
                    &base,
                    Axis::K,
                    &range(1, 30),
                    &[Scheme::NoiseLimited],
                    &both,
                );
            }
        }
        // outage against FAS size for U = 1, 2, 3 at K = 60, γ = 6
        "fig5" => {
            let ws: Vec<f64> = (1..=20).map(|i| i as f64 * 0.5).collect();
            for u in 1..=3 {
                let base = NetworkConfig {
                    n_ports: 60,
                    n_interferers: u,
                    sir_threshold_f: 6.0,
                    sir_threshold_s: 6.0,
                    distances: vec![100.0; u as usize + 1],
                    ..Default::default()
                };
                b.add(&format!("_u{u}"), &base, Axis::W, &ws, &fs, &both);
            }
        }
        // outage against U at K = 25 and 30, γ = 3
        "fig6" => {
            for k in [25, 30] {
                let base = NetworkConfig {
                    n_ports: k,
                    sir_threshold_f: 3.0,
                    sir_threshold_s: 3.0,
                    ..Default::default()
                };
                b.add(&format!("_k{k}"), &base, Axis::U, &range(1, 8), &fs, &both);
            }
        }
        _ => return None,
    }
    Some(b.curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_has_valid_curves() {
        for f in FIGURES {
            let curves = figure_curves(f, 100, 1).unwrap();
            assert!(!curves.is_empty());
            let mut names: Vec<_> = curves.iter().map(|c| c.name.clone()).collect();
            names.sort();
            names.dedup();
            assert_eq!(names.len(), curves.len(), "{f}: duplicate curve names");
            for c in &curves {
                c.spec.validate().unwrap();
            }
        }
        assert!(figure_curves("fig9", 1, 1).is_none());
    }

    #[test]
    fn fig2_has_four_curves() {
        let c = figure_curves("fig2", 100, 1).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c
            .iter()
            .all(|c| c.spec.base.distances == UNEQUAL && c.spec.base.n_ports == 10));
    }
}
