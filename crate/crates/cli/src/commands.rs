use rayon::prelude::*;
use weq_core::arrival::{arrival_distribution, mass_sweep, pi_at_times, separation_sweep};
use weq_core::one_body::TwoBodySystem;
use weq_core::spin_current::spin_mass_sweep;
use weq_core::wavepacket::{normalization, overlap};
use weq_core::StatisticsKind::{self, BoseEinstein, FermiDirac, MaxwellBoltzmann};
use weq_core::{Scenario, TwoBodyConfig, HBAR, NEUTRON_MASS};

use crate::config::{RunConfig, ScenarioChoice};
use crate::error::{CliError, CliResult};
use crate::output::{num, opt, tagged_path, Sink, Table};

pub fn header(cfg: &RunConfig, command: &str) -> Table {
    let mut t = Table::default();
    t.meta(
        "program",
        concat!("weq-arrival ", env!("CARGO_PKG_VERSION")),
    );
    t.meta("command", command);
    for (k, v) in cfg.echo() {
        t.meta(k, v);
    }
    t.meta("unit_time_s", num(cfg.t_ref()));
    t.meta("unit_length_m", num(cfg.sigma0));
    t.meta("unit_mass_kg", num(NEUTRON_MASS));
    t.meta("hbar_js", num(HBAR));
    t
}

fn pair_meta(t: &mut Table, prefix: &str, c: &TwoBodyConfig) {
    let (a, b) = (&c.packet_a, &c.packet_b);
    t.meta(
        format!("{prefix}overlap"),
        num(overlap(a, b, c.scenario).norm()),
    );
    for (name, stats) in [("N_plus", BoseEinstein), ("N_minus", FermiDirac)] {
        let value = normalization(a, b, stats, c.scenario).map_or_else(|e| e.to_string(), num);
        t.meta(format!("{prefix}{name}"), value);
    }
}

fn scenarios(cfg: &RunConfig, default: ScenarioChoice) -> Vec<Scenario> {
    cfg.scenario.unwrap_or(default).scenarios(cfg.g)
}

fn tau_cell(r: &weq_core::Result<f64>, unit: f64) -> String {
    r.as_ref().map_or_else(|_| "nan".into(), |t| num(t / unit))
}

fn join_errors(parts: Vec<(&str, Option<String>)>) -> String {
    parts
        .into_iter()
        .filter_map(|(tag, e)| e.map(|e| format!("{tag}: {e}")))
        .collect::<Vec<_>>()
        .join("; ")
}

fn err_of<T>(r: &weq_core::Result<T>) -> Option<String> {
    r.as_ref().err().map(|e| e.to_string())
}

/// One distribution table per (scenario, z_ca).
pub fn arrival_dist(cfg: &RunConfig) -> CliResult<()> {
    let unit = cfg.t_ref();
    let scenarios = scenarios(cfg, ScenarioChoice::Free);
    let jobs: Vec<(Scenario, f64)> = scenarios
        .iter()
        .flat_map(|s| cfg.z_ca_values().into_iter().map(move |z| (*s, z)))
        .collect();
    let tables: Vec<CliResult<(String, Table)>> = jobs
        .par_iter()
        .map(|&(scenario, z_ca)| {
            let tag = if scenarios.len() > 1 {
                format!("{}_zca{z_ca}", scenario.label())
            } else {
                format!("zca{z_ca}")
            };
            Ok((tag, distribution_table(cfg, scenario, z_ca, unit)?))
        })
        .collect();
    let tables: Vec<(String, Table)> = tables.into_iter().collect::<CliResult<_>>()?;
    match &cfg.out {
        Some(base) => {
            for (tag, t) in &tables {
                Sink::File(tagged_path(base, tag)).write(&t.render(cfg.format.delimiter()))?;
            }
        }
        None => {
            let text: String = tables
                .iter()
                .map(|(_, t)| t.render(cfg.format.delimiter()))
                .collect::<Vec<_>>()
                .join("\n");
            Sink::Stdout.write(&text)?;
        }
    }
    Ok(())
}

fn distribution_table(
    cfg: &RunConfig,
    scenario: Scenario,
    z_ca: f64,
    unit: f64,
) -> CliResult<Table> {
    let detector = cfg.detector();
    let configs: Vec<TwoBodyConfig> = cfg
        .statistics
        .iter()
        .map(|s| cfg.two_body(z_ca, *s, scenario))
        .collect::<CliResult<_>>()?;
    let results: Vec<_> = configs
        .iter()
        .map(|c| arrival_distribution(c, detector, &cfg.policy))
        .collect();
    if results.iter().all(|r| r.is_err()) {
        return Err(results.into_iter().find_map(|r| r.err()).unwrap().into());
    }
    let t_max = cfg.t_max.map(|t| t * unit).unwrap_or_else(|| {
        results
            .iter()
            .filter_map(|r| r.as_ref().ok().map(|r| r.cutoff_time))
            .fold(0.0, f64::max)
    });
    let n = cfg.time_points - 1;
    let times: Vec<f64> = (0..=n).map(|i| t_max * i as f64 / n as f64).collect();

    let mut columns = vec!["t/t_ref"];
    for s in &cfg.statistics {
        columns.push(match s {
            BoseEinstein => "Pi_BE*t_ref",
            FermiDirac => "Pi_FD*t_ref",
            MaxwellBoltzmann => "Pi_MB*t_ref",
        });
    }
    let mut table = header(cfg, "arrival-dist");
    table.columns = columns;
    table.meta("scenario", scenario.label());
    table.meta("z_ca_row", z_ca);
    pair_meta(&mut table, "", &configs[0]);
    let mut series = Vec::new();
    for ((c, r), s) in configs.iter().zip(&results).zip(&cfg.statistics) {
        let tag = s.tag();
        match r {
            Ok(r) => {
                table.meta(format!("tau_{tag}"), num(r.mean_time / unit));
                table.meta(format!("tau_error_{tag}"), num(r.mean_time_error() / unit));
                table.meta(format!("norm_integral_{tag}"), num(r.norm_integral));
                table.meta(format!("cutoff_{tag}"), num(r.cutoff_time / unit));
                let pi = pi_at_times(c, detector, r.norm_integral, &times)?;
                series.push(Some(pi));
            }
            Err(e) => {
                table.meta(format!("error_{tag}"), e);
                series.push(None);
            }
        }
    }
    for (i, t) in times.iter().enumerate() {
        let mut row = vec![num(t / unit)];
        for s in &series {
            row.push(
                s.as_ref()
                    .map_or_else(|| "nan".into(), |p| num(p[i] * unit)),
            );
        }
        table.push(row);
    }
    Ok(table)
}

pub fn tables(cfg: &RunConfig) -> CliResult<()> {
    let unit = cfg.t_ref();
    let z = cfg.z_ca_values();
    let mut table = header(cfg, "tables");
    table.columns = vec![
        "scenario",
        "z_ca/sigma0",
        "overlap",
        "tau_BE/t_ref",
        "tau_FD/t_ref",
        "tau_MB/t_ref",
        "error",
    ];
    let mut any = false;
    for scenario in scenarios(cfg, ScenarioChoice::Both) {
        let template = cfg.two_body(z[0], BoseEinstein, scenario)?;
        let rows = separation_sweep(
            &template,
            &z.iter().map(|v| v * cfg.sigma0).collect::<Vec<_>>(),
            cfg.detector(),
            &cfg.policy,
        )?;
        for row in rows {
            let mut pair = template;
            pair.packet_a.z_c = row.z_ca;
            pair_meta(
                &mut table,
                &format!("{}_zca{}_", scenario.label(), row.z_ca / cfg.sigma0),
                &pair,
            );
            any |= row.tau_be.is_ok() || row.tau_fd.is_ok() || row.tau_mb.is_ok();
            table.push(vec![
                scenario.label().into(),
                num(row.z_ca / cfg.sigma0),
                num(row.overlap),
                tau_cell(&row.tau_be, unit),
                tau_cell(&row.tau_fd, unit),
                tau_cell(&row.tau_mb, unit),
                join_errors(vec![
                    ("BE", err_of(&row.tau_be)),
                    ("FD", err_of(&row.tau_fd)),
                    ("MB", err_of(&row.tau_mb)),
                ]),
            ]);
        }
    }
    write_table(cfg, &table, any)
}

fn write_table(cfg: &RunConfig, table: &Table, any: bool) -> CliResult<()> {
    if !any {
        return Err(CliError::Numerical(
            weq_core::Error::UnsupportedConfiguration(
                "every requested quantity failed; see the error column".into(),
            ),
        ));
    }
    Sink::from_out(cfg.out.as_deref()).write(&table.render(cfg.format.delimiter()))
}

struct Moments {
    z_plus: weq_core::Result<f64>,
    z_minus: weq_core::Result<f64>,
    t_plus: weq_core::Result<f64>,
    t_minus: weq_core::Result<f64>,
    dz_plus: weq_core::Result<f64>,
    dz_minus: weq_core::Result<f64>,
}

fn moments(config: &TwoBodyConfig, detector: f64) -> Moments {
    let one = |stats: StatisticsKind| {
        let system = TwoBodySystem::new(config.with_statistics(stats));
        let z0 = system
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|s| s.mean_position(0.0));
        let t = system
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|s| s.center_crossing_time(detector));
        let dz = match (&system, &t) {
            (Ok(s), Ok(t)) => s.position_spread(*t),
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        };
        (z0, t, dz)
    };
    let (z_plus, t_plus, dz_plus) = one(BoseEinstein);
    let (z_minus, t_minus, dz_minus) = one(FermiDirac);
    Moments {
        z_plus,
        z_minus,
        t_plus,
        t_minus,
        dz_plus,
        dz_minus,
    }
}

pub fn mass_sweep_cmd(cfg: &RunConfig) -> CliResult<()> {
    let unit = cfg.t_ref();
    let s0 = cfg.sigma0;
    let scenario = match scenarios(cfg, ScenarioChoice::Fall)[..] {
        [one] => one,
        _ => {
            return Err(CliError::Validation(
                "mass-sweep takes a single scenario (free or fall)".into(),
            ))
        }
    };
    // sweeps run at the first listed separation
    let z = cfg.z_ca_values();
    let template = cfg.two_body(z[0], BoseEinstein, scenario)?;
    let masses: Vec<f64> = cfg.mass_grid().iter().map(|m| m * NEUTRON_MASS).collect();
    let rows = mass_sweep(&template, &masses, cfg.detector(), &cfg.policy)?;
    let extra: Vec<Moments> = masses
        .par_iter()
        .map(|m| moments(&template.with_mass(*m), cfg.detector()))
        .collect();

    let mut table = header(cfg, "mass-sweep");
    table.meta("scenario", scenario.label());
    table.meta("z_ca_row", z[0]);
    pair_meta(&mut table, "", &template);
    table.columns = vec![
        "m/m_n",
        "tau_BE/t_ref",
        "tau_FD/t_ref",
        "tau_MB/t_ref",
        "tau_a/t_ref",
        "tau_b/t_ref",
        "mb_average_residual/t_ref",
        "z_plus_0/sigma0",
        "z_minus_0/sigma0",
        "t_plus/t_ref",
        "t_minus/t_ref",
        "dz_plus/sigma0",
        "dz_minus/sigma0",
        "error",
    ];
    let mut any = false;
    for (row, m) in rows.iter().zip(&extra) {
        any |= row.tau_be.is_ok() || row.tau_fd.is_ok() || row.tau_mb.is_ok();
        let len = |r: &weq_core::Result<f64>| tau_cell(r, s0);
        table.push(vec![
            num(row.mass / NEUTRON_MASS),
            tau_cell(&row.tau_be, unit),
            tau_cell(&row.tau_fd, unit),
            tau_cell(&row.tau_mb, unit),
            tau_cell(&row.tau_a, unit),
            tau_cell(&row.tau_b, unit),
            opt(row.mb_average_residual().map(|r| r / unit)),
            len(&m.z_plus),
            len(&m.z_minus),
            tau_cell(&m.t_plus, unit),
            tau_cell(&m.t_minus, unit),
            len(&m.dz_plus),
            len(&m.dz_minus),
            join_errors(vec![
                ("BE", err_of(&row.tau_be)),
                ("FD", err_of(&row.tau_fd)),
                ("MB", err_of(&row.tau_mb)),
                ("a", err_of(&row.tau_a)),
                ("b", err_of(&row.tau_b)),
                ("plus", err_of(&m.dz_plus)),
                ("minus", err_of(&m.dz_minus)),
            ]),
        ]);
    }
    write_table(cfg, &table, any)
}

pub fn spin_sweep(cfg: &RunConfig) -> CliResult<()> {
    let unit = cfg.t_ref();
    let scn = cfg.spin_scenario()?;
    let masses: Vec<f64> = cfg.mass_grid().iter().map(|m| m * NEUTRON_MASS).collect();
    let rows = spin_mass_sweep(&scn, &masses, cfg.detector(), &cfg.policy)?;
    let mut table = header(cfg, "spin-sweep");
    table.meta("spin_z_c", cfg.spin_z_c);
    table.meta("spin_k0", cfg.spin_k0);
    table.meta(
        "spin_axis",
        cfg.spin_axis
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";"),
    );
    table.columns = vec![
        "m/m_n",
        "tau_sch/t_ref",
        "tau_spin/t_ref",
        "difference/t_ref",
        "error",
    ];
    let mut any = false;
    for row in &rows {
        let cells = match &row.result {
            Ok(c) => {
                any = true;
                vec![
                    num(c.tau_sch / unit),
                    num(c.tau_spin / unit),
                    num(c.delta / unit),
                    String::new(),
                ]
            }
            Err(e) => vec!["nan".into(), "nan".into(), "nan".into(), e.to_string()],
        };
        let mut r = vec![num(row.mass / NEUTRON_MASS)];
        r.extend(cells);
        table.push(r);
    }
    write_table(cfg, &table, any)
}
