//! the workbench front end: every command loads one config file, runs one
//! computation, and emits one structured report.

use clap::{Parser, Subcommand};
use homlab_cli::config;
use homlab_cli::report::Report;
use homlab_cli::suite::identity_suite;
use homlab::bar::bar_complex;
use homlab::homalg::{e_complex, ext_oracle, stable_hom_oracle};
use homlab::singyoneda::sy_cohomology;
use homlab::stabilization::{
    comparison_c, complete_resolution, gorenstein_probe, stab,
};

#[derive(Parser)]
#[command(name = "homlab", about = "exact homological algebra workbench")]
struct Cli {
    /// output format: table | json | csv
    #[arg(long, default_value = "table", global = true)]
    format: String,
    /// write the report to a file instead of standard output
    #[arg(long, global = true)]
    out: Option<String>,
    /// exit with code 2 when the report carries warnings
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// validate an algebra config and summarize it
    Algebra {
        config: String,
        #[command(subcommand)]
        sub: AlgebraSub,
    },
    /// dump the dimensions of the truncated bar complex
    Bar {
        config: String,
        #[command(subcommand)]
        sub: BarSub,
    },
    /// Ext dimensions between two modules
    Ext {
        config: String,
        m: String,
        n: String,
        #[arg(long, default_value_t = 6)]
        max_deg: usize,
    },
    /// stabilized singularity-category hom dimensions
    DsgHom {
        config: String,
        m: String,
        n: String,
        #[arg(long, default_value = "-4..4", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 10)]
        stage_cap: usize,
    },
    /// Tate cohomology via the syzygy oracle (self-injective algebras)
    Tate {
        config: String,
        m: String,
        #[arg(long, default_value = "-4..4", allow_hyphen_values = true)]
        range: String,
    },
    /// projective / complete resolution windows
    Resolve {
        config: String,
        m: String,
        #[arg(long)]
        complete: bool,
        #[arg(long, default_value = "-3..3", allow_hyphen_values = true)]
        window: String,
    },
    /// stabilization window of a complex (or module stalk)
    Stab {
        config: String,
        #[arg(default_value = "k")]
        x: String,
        #[arg(long, default_value = "-3..3", allow_hyphen_values = true)]
        window: String,
    },
    /// compare the singular hom pipeline against the stabilization window
    Compare {
        config: String,
        #[arg(default_value = "k")]
        m: String,
        #[arg(long, default_value = "-3..3", allow_hyphen_values = true)]
        window: String,
    },
    /// Ext^n(S, Lambda) vanishing probe
    Gorenstein {
        config: String,
        #[arg(long, default_value_t = 8)]
        max_deg: usize,
    },
    /// run the randomized identity suite
    Verify {
        config: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
}

#[derive(Subcommand)]
enum AlgebraSub {
    Check,
}

#[derive(Subcommand)]
enum BarSub {
    Dump {
        #[arg(long, default_value_t = 3)]
        cap: usize,
    },
}

fn run(cli: &Cli) -> Result<Report, String> {
    match &cli.command {
        Command::Algebra { config, sub: AlgebraSub::Check } => {
            let job = config::load(config)?;
            let mut rep = Report::new("algebra check", &job.name);
            rep.param("dim", job.algebra.dim);
            rep.param("idempotents", job.algebra.num_idempotents());
            rep.param("characteristic", job.algebra.field.characteristic);
            rep.param("basis", job.algebra.labels.join(" "));
            rep.row(0, job.algebra.dim as i64, true, 0);
            Ok(rep)
        }
        Command::Bar { config, sub: BarSub::Dump { cap } } => {
            let job = config::load(config)?;
            let bt = bar_complex(&job.algebra, *cap);
            let mut rep = Report::new("bar dump", &job.name);
            rep.param("cap", cap);
            for n in -(*cap as i64)..=0 {
                rep.row(n, bt.complex.dim_at(n) as i64, true, *cap as i64);
            }
            Ok(rep)
        }
        Command::Ext { config, m, n, max_deg } => {
            let job = config::load(config)?;
            let mm = config::resolve_module(&job, m)?;
            let nn = config::resolve_module(&job, n)?;
            let mut rep = Report::new("ext", &job.name);
            rep.param("m", m);
            rep.param("n", n);
            rep.param("max_deg", max_deg);
            for d in 0..=*max_deg {
                let v = ext_oracle(&job.algebra, &mm, &nn, d).map_err(|e| format!("{m}: {e}"))?;
                rep.row(d as i64, v as i64, true, 0);
            }
            Ok(rep)
        }
        Command::DsgHom { config, m, n, range, stage_cap } => {
            let job = config::load(config)?;
            let (lo, hi) = config::parse_range(range)?;
            let mm = config::resolve_module(&job, m)?;
            let nn = config::resolve_module(&job, n)?;
            let mut rep = Report::new("dsg-hom", &job.name);
            rep.param("m", m);
            rep.param("n", n);
            rep.param("range", range);
            rep.param("stage_cap", stage_cap);
            for d in lo..=hi {
                let r = sy_cohomology(&job.algebra, &mm, &nn, d, *stage_cap, 3)
                    .map_err(|e| format!("{m}: {e}"))?;
                let v = r.value.map(|v| v as i64).unwrap_or(-1);
                if !r.stable {
                    rep.warnings
                        .push(format!("degree {d} did not stabilize within stage {stage_cap}"));
                }
                rep.row(d, v, r.stable, r.stage as i64);
            }
            Ok(rep)
        }
        Command::Tate { config, m, range } => {
            let job = config::load(config)?;
            let (lo, hi) = config::parse_range(range)?;
            let mm = config::resolve_module(&job, m)?;
            let kk = config::resolve_module(&job, "k")?;
            let mut rep = Report::new("tate", &job.name);
            rep.param("m", m);
            rep.param("range", range);
            for d in lo..=hi {
                let v = stable_hom_oracle(&job.algebra, &mm, &kk, d)
                    .map_err(|e| format!("{m}: {e}"))?;
                rep.row(d, v as i64, true, 0);
            }
            Ok(rep)
        }
        Command::Resolve { config, m, complete, window } => {
            let job = config::load(config)?;
            let (lo, hi) = config::parse_range(window)?;
            let mm = config::resolve_module(&job, m)?;
            let mut rep = Report::new("resolve", &job.name);
            rep.param("m", m);
            rep.param("window", window);
            rep.param("complete", complete);
            if *complete {
                let w = complete_resolution(&job.algebra, &mm, lo, hi)
                    .map_err(|e| format!("{m}: {e}"))?;
                for d in lo..=hi {
                    rep.row(d, w.dims[&d] as i64, w.acyclic, 0);
                }
                if w.contractible {
                    rep.param("contractible", true);
                }
                if !w.components_injective {
                    rep.warnings.push("a window component is not injective".into());
                }
                if !w.probe_consistent {
                    rep.warnings
                        .push("Gorenstein probe inconsistent; window is evidence only".into());
                }
            } else {
                let res = homlab::homalg::proj_resolution(
                    &job.algebra,
                    &mm,
                    (-lo).max(0) as usize + 1,
                )
                .map_err(|e| format!("{m}: {e}"))?;
                for (j, step) in res.steps.iter().enumerate() {
                    rep.row(-(j as i64), step.module.dim as i64, true, 0);
                }
            }
            Ok(rep)
        }
        Command::Stab { config, x, window } => {
            let job = config::load(config)?;
            let (lo, hi) = config::parse_range(window)?;
            let c = config::resolve_complex(&job, x)?;
            let ec = e_complex(&job.algebra, &c);
            let sw = stab(&job.algebra, &ec, lo, hi).map_err(|e| format!("{x}: {e}"))?;
            let mut rep = Report::new("stab", &job.name);
            rep.param("x", x);
            rep.param("window", window);
            rep.param("bar_cap", sw.bar_cap);
            for d in lo..=hi {
                let h = sw.cohomology.get(&d).copied().unwrap_or(0);
                rep.row(d, sw.cone.components[&d].dim as i64, h == 0, sw.bar_cap as i64);
            }
            if !sw.acyclic_interior {
                rep.warnings.push("cone not acyclic on the window interior".into());
            }
            if !sw.components_injective {
                rep.warnings.push("a cone component is not injective".into());
            }
            Ok(rep)
        }
        Command::Compare { config, m, window } => {
            let job = config::load(config)?;
            let (lo, hi) = config::parse_range(window)?;
            let mm = config::resolve_module(&job, m)?;
            let r = comparison_c(&job.algebra, &mm, lo, hi, 3).map_err(|e| format!("{m}: {e}"))?;
            let mut rep = Report::new("compare", &job.name);
            rep.param("m", m);
            rep.param("window", window);
            rep.param("certified", r.certified);
            rep.param("dims_agree", r.dims_agree);
            for d in lo..=hi {
                rep.row(d, r.sy_dims[&d] as i64, r.dims_agree, r.stage as i64);
            }
            rep.warnings.extend(r.warnings.iter().cloned());
            if !r.certified {
                rep.warnings.push("comparison not certified in the window".into());
            }
            Ok(rep)
        }
        Command::Gorenstein { config, max_deg } => {
            let job = config::load(config)?;
            let r = gorenstein_probe(&job.algebra, *max_deg).map_err(|e| e.to_string())?;
            let mut rep = Report::new("gorenstein", &job.name);
            rep.param("max_deg", max_deg);
            rep.param("consistent", r.consistent);
            for d in 1..=*max_deg {
                let hits = r.nonzero.iter().filter(|l| l.contains(&d)).count();
                rep.row(d as i64, hits as i64, r.consistent, 0);
            }
            if !r.consistent {
                rep.warnings
                    .push("Ext against the regular module has no vanishing tail".into());
            }
            Ok(rep)
        }
        Command::Verify { config, seed, trials } => {
            let job = config::load(config)?;
            let out = identity_suite(&job.algebra, *seed, *trials);
            let mut rep = Report::new("verify", &job.name);
            rep.param("seed", seed);
            rep.param("trials", trials);
            rep.param("elements", out.elements);
            for (i, (name, ok)) in out.checks.iter().enumerate() {
                rep.param(&format!("check {i}"), name);
                rep.row(i as i64, if *ok { 1 } else { 0 }, *ok, 0);
            }
            if out.all_passed() {
                rep.param("result", "all identity suites passed");
            } else {
                rep.warnings.push("identity suite failures".into());
            }
            Ok(rep)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            let text = rep.render(&cli.format);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("error: cannot write {path}: {e}");
                        std::process::exit(1);
                    }
                }
                None => print!("{text}"),
            }
            if cli.strict && !rep.warnings.is_empty() {
                std::process::exit(2);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
