use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use opmc::builders::{ass_cochains, barratt_eccles, com_cochains};
use opmc::cofree::{completeness_check, curvature};
use opmc::cooperad::{validate_cooperad, validate_hopf, Cooperad};
use opmc::instance::{
    convolution_from_file, convolution_to_file, load_instance, load_simplex, parse_element, parse_face, parse_ring,
    to_json,
};
use opmc::mc_space::{horn_faces, kan_spot_check, lin_to_string};
use opmc::report::Report;
use opmc::simplicial::{cochain_decompose, face_name};
use opmc::{Error, Result};

#[derive(Parser)]
#[command(name = "opmc", version, about = "Twisting and Maurer-Cartan computations over Hopf cooperads")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an instance and run every validator.
    Validate { instance: PathBuf },
    /// Build a cooperad and print its components and validation report.
    BuildCooperad {
        /// ass, com or barratt-eccles
        #[arg(long)]
        builder: String,
        #[arg(long, default_value = "Z")]
        ring: String,
        #[arg(long)]
        max_arity: usize,
        /// Filtration level E_n of the Barratt-Eccles operad; omit for E_∞.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        max_dim: usize,
    },
    /// Twist the coderivation by a degree-0 element and write the resulting instance.
    Twist {
        instance: PathBuf,
        #[arg(long)]
        element: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the MC residual of an element, or list all MC elements.
    Mc {
        instance: PathBuf,
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        enumerate: bool,
    },
    /// Check an n-simplex of the MC simplicial set, or list all of them.
    McSimplicial {
        instance: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        enumerate: bool,
        #[arg(long)]
        simplex: Option<PathBuf>,
    },
    /// Fill a horn of the MC simplicial set.
    HornFill {
        instance: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        horn: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fill random horns cut out of random MC simplices.
    KanCheck {
        instance: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the coalgebra decomposition of a simplex over Barratt-Eccles cochains.
    DecomposeSimplex {
        #[arg(long, default_value = "Z")]
        ring: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_arity: usize,
        #[arg(long)]
        max_dim: usize,
        /// A face such as e012.
        #[arg(long)]
        face: String,
        #[arg(long)]
        arity: usize,
    },
    /// Write an instance in canonical form.
    Export {
        instance: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(1)
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn print_cooperad(co: &Cooperad) {
    for r in 0..=co.max_arity() {
        let comp = co.component(r);
        let names: Vec<String> = (0..comp.dim()).map(|b| format!("{}:{}", comp.name(b), comp.degree(b))).collect();
        let kind = if comp.is_free() { "free" } else { "trivial" };
        println!("arity {r} ({kind}, dim {}): {}", comp.dim(), names.join(" "));
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Validate { instance } => {
            let inst = load_instance(&instance)?;
            let cf = inst.cofree();
            let mut report = Report::new(format!("instance {}", instance.display()));
            report.extend(validate_cooperad(cf.cooperad()));
            report.extend(validate_hopf(cf.cooperad(), inst.hopf.hopf()));
            report.extend(completeness_check(cf, &inst.q));
            let big_q = cf.coderivation_extend(&inst.q);
            report.record("coderivation squares to zero", big_q.square_witness());
            print!("{report}");
            let curv = curvature(&inst.q);
            println!("curvature: {}", lin_to_string(cf.module(), &curv));
            Ok(report.is_ok())
        }
        Command::BuildCooperad { builder, ring, max_arity, n, max_dim } => {
            let ring = parse_ring(&ring)?;
            let (co, hopf) = match builder.as_str() {
                "ass" => ass_cochains(&ring, max_arity)?,
                "com" => com_cochains(&ring, max_arity)?,
                "barratt-eccles" => {
                    let cc = barratt_eccles(&ring, n, max_arity, max_dim)?;
                    (cc.cooperad, cc.hopf)
                }
                other => return Err(Error::Parse(format!("unknown builder {other:?}"))),
            };
            print_cooperad(&co);
            let mut report = validate_cooperad(&co);
            report.extend(validate_hopf(&co, &hopf));
            print!("{report}");
            Ok(report.is_ok())
        }
        Command::Twist { instance, element, output } => {
            let inst = load_instance(&instance)?;
            let v = parse_element(inst.module(), inst.ring(), &element)?;
            let twisted = inst.with_q(inst.hopf.twist(&inst.q, &v)?);
            emit(output.as_deref(), &to_json(&twisted.to_file())?)?;
            Ok(true)
        }
        Command::Mc { instance, element, enumerate } => {
            let inst = load_instance(&instance)?;
            let m = inst.module();
            if let Some(e) = element {
                let v = parse_element(m, inst.ring(), &e)?;
                let res = inst.hopf.mc_residual(&inst.q, &v)?;
                println!("residual: {}", lin_to_string(m, &res));
                println!("maurer-cartan: {}", if res.is_zero() { "yes" } else { "no" });
            }
            if enumerate {
                let all = inst.hopf.mc_enumerate(&inst.q)?;
                let names: Vec<String> = all.iter().map(|v| lin_to_string(m, v)).collect();
                println!("{{{}}}", names.join(", "));
            }
            Ok(true)
        }
        Command::McSimplicial { instance, n, enumerate, simplex } => {
            let inst = load_instance(&instance)?;
            let space = inst.mc_space()?;
            let m = inst.module();
            let mut ok = true;
            if let Some(path) = simplex {
                let file = load_simplex(&path)?;
                if file.n != n {
                    return Err(Error::Shape(format!("simplex file is on Δ^{}, not Δ^{n}", file.n)));
                }
                let psi = convolution_from_file(m, inst.ring(), &file)?;
                let (is_mc, res) = space.mc_check(&psi)?;
                println!("maurer-cartan: {}", if is_mc { "yes" } else { "no" });
                if !is_mc {
                    println!("residual: {}", res.to_string(m));
                }
                if n > 0 {
                    for i in 0..=n {
                        println!("d{i}: {}", space.face(i, &psi)?.to_string(m));
                    }
                }
                ok = is_mc;
            }
            if enumerate {
                let all = space.mc_simplices(n)?;
                println!("{} simplices", all.len());
                for psi in &all {
                    println!("{}", psi.to_string(m));
                }
            }
            Ok(ok)
        }
        Command::HornFill { instance, n, k, horn, output } => {
            let inst = load_instance(&instance)?;
            let space = inst.mc_space()?;
            let m = inst.module();
            let file = load_simplex(&horn)?;
            if file.n != n || file.k.is_some_and(|fk| fk != k) {
                return Err(Error::Shape("horn file does not describe the requested horn".into()));
            }
            let phi = convolution_from_file(m, inst.ring(), &file)?;
            let allowed: HashSet<u32> = horn_faces(n, k).into_iter().collect();
            if let Some(f) = phi.values.keys().find(|f| !allowed.contains(f)) {
                return Err(Error::Shape(format!("{} is not a face of the horn Λ^{n}_{k}", face_name(*f))));
            }
            let (psi, steps) = space.horn_fill(&phi, k, None)?;
            eprintln!("filled Λ^{n}_{k} with {steps} corrections");
            emit(output.as_deref(), &to_json(&convolution_to_file(m, &psi, None))?)?;
            Ok(true)
        }
        Command::KanCheck { instance, trials, max_n, seed } => {
            let inst = load_instance(&instance)?;
            let space = inst.mc_space()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let report = kan_spot_check(&space, max_n.max(1), trials, &mut rng)?;
            println!(
                "attempted {} filled {} skipped {} max corrections {}",
                report.attempted, report.filled, report.skipped, report.max_corrections
            );
            for f in &report.failures {
                println!("FAIL {f}");
            }
            Ok(report.failures.is_empty())
        }
        Command::DecomposeSimplex { ring, n, max_arity, max_dim, face, arity } => {
            let ring = parse_ring(&ring)?;
            let cc = barratt_eccles(&ring, n, max_arity, max_dim)?;
            let f = parse_face(&face)?;
            let dec = cochain_decompose(&ring, &cc, f, arity)?;
            let comp = cc.cooperad.component(arity);
            for ((b, faces), c) in dec.iter() {
                let parts: Vec<String> = faces.iter().map(|&g| face_name(g)).collect();
                println!("{c} {} ⊗ {}", comp.name(*b), parts.join(" ⊗ "));
            }
            Ok(true)
        }
        Command::Export { instance, output } => {
            let inst = load_instance(&instance)?;
            emit(output.as_deref(), &to_json(&inst.to_file())?)?;
            Ok(true)
        }
    }
}
