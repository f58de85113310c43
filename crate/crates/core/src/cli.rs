//! The `umeb` command line.
//!
//! Exit codes: 0 ok/pass, 1 error, 2 verification failed, 3 certification
//! not applicable, 4 signatures not distinguished.
//!
//! With `--json` the versioned JSON report is the only thing written to
//! stdout; the human-readable text moves to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::constructions::{bravyi_smolin_3, lift, umeb_6, weyl_family, LiftCounts, Provenance, UmebCandidate};
use crate::error::{Result, UmebError};
use crate::linalg::Tolerances;
use crate::matrix_set::{load_umeb, save_umeb};
use crate::report::envelope_json;
use crate::spectral::{compare_signatures, signature, Distinction, DEFAULT_BOUND};
use crate::verification::{
    search_extension, structural_certify, verify_axioms, CertificateStatus, SearchParams, SearchVerdict,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_VERIFY_FAILED: u8 = 2;
pub const EXIT_NOT_APPLICABLE: u8 = 3;
pub const EXIT_NOT_DISTINGUISHED: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "umeb",
    version,
    about = "Construct, verify, lift and fingerprint unextendible maximally entangled bases"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// All d² Weyl operators (a complete basis, not a UMEB)
    Weyl,
    /// The six-member set in dimension 3
    Bs3,
    /// The 30-member set in dimension 6
    Umeb6,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a matrix family and write it as a matrix-set file
    Construct {
        kind: Kind,
        #[arg(short = 'd', value_parser = clap::value_parser!(u64).range(1..))]
        d: Option<u64>,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Lift a set in dimension d to dimension qd
    Lift {
        input: PathBuf,
        #[arg(short = 'q', value_parser = clap::value_parser!(u64).range(1..))]
        q: u64,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check unitarity, trace orthogonality and the element count
    Verify {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        unitarity_tol: f64,
        #[arg(long, default_value_t = 1e-10)]
        gram_tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Search the orthogonal complement for a unitary (an extension)
    Search {
        input: PathBuf,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
        iters: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Where to write the extension when one is found [default: <input>.witness.json]
        #[arg(long)]
        witness_out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Replay the lifting argument on a lifted set
    Certify {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Eigenphase-order summary of a set
    Spectral {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOUND, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
        #[arg(long, default_value_t = 1e-9)]
        phase_tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Compare the spectral signatures of two sets
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOUND, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
        #[arg(long, default_value_t = 1e-9)]
        phase_tol: f64,
        #[arg(long)]
        json: bool,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
}

impl Io<'_> {
    /// Human-readable line: stdout normally, stderr under `--json`.
    fn say(&mut self, text: &str) {
        let sink: &mut dyn Write = if self.json { &mut *self.err } else { &mut *self.out };
        let _ = writeln!(sink, "{text}");
    }

    fn warn(&mut self, text: &str) {
        let _ = writeln!(self.err, "warning: {text}");
    }

    fn report<T: Serialize>(&mut self, kind: &str, report: &T, notes: &[String]) {
        for n in notes {
            self.warn(n);
        }
        if self.json {
            let _ = writeln!(self.out, "{}", envelope_json(kind, report, notes));
        }
    }
}

/// Parses `args` (program name first) and runs one command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_ERROR
                }
            };
        }
    };
    match execute(config.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn json_flag(cmd: &Command) -> bool {
    match cmd {
        Command::Construct { json, .. }
        | Command::Lift { json, .. }
        | Command::Verify { json, .. }
        | Command::Search { json, .. }
        | Command::Certify { json, .. }
        | Command::Spectral { json, .. }
        | Command::Compare { json, .. } => *json,
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let mut io = Io {
        out,
        err,
        json: json_flag(&cmd),
    };
    match cmd {
        Command::Construct { kind, d, out, .. } => cmd_construct(&mut io, kind, d, &out),
        Command::Lift { input, q, out, .. } => cmd_lift(&mut io, &input, q as usize, out.as_deref()),
        Command::Verify {
            input,
            unitarity_tol,
            gram_tol,
            ..
        } => {
            let tol = Tolerances::new(unitarity_tol, gram_tol, Tolerances::default().phase_tol)?;
            cmd_verify(&mut io, &input, &tol)
        }
        Command::Search {
            input,
            restarts,
            iters,
            seed,
            tol,
            witness_out,
            ..
        } => {
            let params = SearchParams {
                restarts: restarts as usize,
                iters: iters as usize,
                seed,
                extension_tol: tol,
            };
            cmd_search(&mut io, &input, &params, witness_out)
        }
        Command::Certify { input, .. } => cmd_certify(&mut io, &input),
        Command::Spectral {
            input,
            bound,
            phase_tol,
            ..
        } => cmd_spectral(&mut io, &input, bound, &phase_tolerances(phase_tol)?),
        Command::Compare {
            a, b, bound, phase_tol, ..
        } => cmd_compare(&mut io, &a, &b, bound, &phase_tolerances(phase_tol)?),
    }
}

fn phase_tolerances(phase_tol: f64) -> Result<Tolerances> {
    let d = Tolerances::default();
    Tolerances::new(d.unitarity_tol, d.gram_tol, phase_tol)
}

#[derive(Serialize)]
struct ConstructReport {
    provenance: String,
    dim: usize,
    element_count: usize,
    path: String,
}

fn cmd_construct(io: &mut Io, kind: Kind, d: Option<u64>, out: &Path) -> Result<u8> {
    let candidate = match kind {
        Kind::Weyl => {
            let d = d.ok_or_else(|| UmebError::InvalidArgument("construct weyl requires -d".into()))?;
            weyl_family(d as usize)
        }
        Kind::Bs3 => bravyi_smolin_3(),
        Kind::Umeb6 => umeb_6(),
    };
    save_umeb(&candidate, out)?;
    io.say(&format!(
        "{}: {} elements of dimension {}, written to {}",
        candidate.provenance(),
        candidate.len(),
        candidate.dim(),
        out.display()
    ));
    if let Some(cos) = candidate.exact_cos_theta() {
        io.say(&format!("exact cos(theta) = {}/{}", cos.numer(), cos.denom()));
    }
    let report = ConstructReport {
        provenance: candidate.provenance().to_string(),
        dim: candidate.dim(),
        element_count: candidate.len(),
        path: out.display().to_string(),
    };
    io.report("construct", &report, &[]);
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct LiftReport {
    base_dim: usize,
    base_count: usize,
    q: usize,
    dim: usize,
    element_count: usize,
    /// q(q−1)d² + qN
    constructed_count: usize,
    /// (qd)² − (d² − N)
    headline_count: i64,
    counts_consistent: bool,
    base_condition_i_ok: bool,
    path: Option<String>,
}

fn cmd_lift(io: &mut Io, input: &Path, q: usize, out: Option<&Path>) -> Result<u8> {
    let base = load_umeb(input)?;
    let lifted = lift(&base, q)?;
    let counts = LiftCounts::new(base.dim(), base.len(), q);
    let d = base.dim();
    let base_condition_i_ok = base.len() < d * d;
    let mut notes = Vec::new();
    if !base_condition_i_ok {
        notes.push(format!(
            "base has N = {} >= d^2 = {} elements: condition (i) is violated for the base",
            base.len(),
            d * d
        ));
    }
    if !counts.consistent() {
        notes.push(format!(
            "the closed form (qd)^2 - (d^2 - N) gives {} but the construction q(q-1)d^2 + qN yields {}",
            counts.headline, counts.constructed
        ));
    }
    io.say(&format!(
        "base: {} elements of dimension {d} ({})",
        base.len(),
        base.provenance()
    ));
    io.say(&format!(
        "lift q = {q}: {} elements of dimension {}",
        lifted.len(),
        lifted.dim()
    ));
    io.say(&format!("  q(q-1)d^2 + qN      = {}", counts.constructed));
    io.say(&format!("  (qd)^2 - (d^2 - N)  = {}", counts.headline));
    if let Some(path) = out {
        save_umeb(&lifted, path)?;
        io.say(&format!("written to {}", path.display()));
    }
    let report = LiftReport {
        base_dim: d,
        base_count: base.len(),
        q,
        dim: lifted.dim(),
        element_count: lifted.len(),
        constructed_count: counts.constructed,
        headline_count: counts.headline,
        counts_consistent: counts.consistent(),
        base_condition_i_ok,
        path: out.map(|p| p.display().to_string()),
    };
    io.report("lift", &report, &notes);
    Ok(EXIT_OK)
}

fn cmd_verify(io: &mut Io, input: &Path, tol: &Tolerances) -> Result<u8> {
    let c = load_umeb(input)?;
    let r = verify_axioms(&c, tol)?;
    io.say(&format!("dimension               {}", r.dim));
    io.say(&format!(
        "elements                {} (d^2 = {})",
        r.element_count,
        r.dim * r.dim
    ));
    io.say(&format!("max unitarity residual  {:.3e}", r.max_unitarity_residual));
    io.say(&format!("max |Gram off-diagonal| {:.3e}", r.max_gram_offdiag));
    io.say(&format!("max |Gram diag - d|     {:.3e}", r.max_gram_diag_error));
    io.say(&format!(
        "condition (i)           {}",
        if r.condition_i_ok { "ok" } else { "violated" }
    ));
    io.say(if r.passed { "PASSED" } else { "FAILED" });
    io.report("verification", &r, &[]);
    Ok(if r.passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn default_witness_path(input: &Path) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "candidate".into());
    input.with_file_name(format!("{stem}.witness.json"))
}

fn cmd_search(io: &mut Io, input: &Path, params: &SearchParams, witness_out: Option<PathBuf>) -> Result<u8> {
    let c = load_umeb(input)?;
    let r = search_extension(&c, params)?;
    io.say(&format!("verdict            {:?}", r.verdict));
    io.say(&format!("best nuclear norm  {:.12}", r.best_nuclear_norm));
    io.say(&format!("gap                {:.6e}", r.gap));
    io.say(&format!("complement dim     {}", r.complement_dim));
    io.say(&format!("restarts           {} (best {})", r.restarts, r.best_restart));
    io.say(&format!("iters, seed        {}, {}", r.iters, r.seed));
    if let (SearchVerdict::ExtensionFound, Some(ext)) = (r.verdict, &r.extension) {
        let path = witness_out.unwrap_or_else(|| default_witness_path(input));
        let label = format!("extension of {}", c.provenance());
        let witness = UmebCandidate::new(c.dim(), vec![ext.clone()], Provenance::External(label))?;
        save_umeb(&witness, &path)?;
        io.say(&format!("extension written to {}", path.display()));
    }
    let notes = r.notes.clone();
    io.report("search", &r, &notes);
    Ok(EXIT_OK)
}

fn cmd_certify(io: &mut Io, input: &Path) -> Result<u8> {
    let c = load_umeb(input)?;
    let cert = structural_certify(&c)?;
    io.say(&format!("provenance: {}", cert.provenance));
    for ch in &cert.checks {
        io.say(&format!(
            "  [{}] {:<38} {:>12.4e}  {}",
            if ch.passed { "pass" } else { "FAIL" },
            ch.name,
            ch.detail,
            ch.note
        ));
    }
    io.say(&format!("overall: {:?}", cert.overall));
    io.report("certificate", &cert, &[]);
    Ok(match cert.overall {
        CertificateStatus::CertifiedConditionalOnBase => EXIT_OK,
        CertificateStatus::Failed => EXIT_VERIFY_FAILED,
        CertificateStatus::NotApplicable => EXIT_NOT_APPLICABLE,
    })
}

fn cmd_spectral(io: &mut Io, input: &Path, bound: u64, tol: &Tolerances) -> Result<u8> {
    let c = load_umeb(input)?;
    let sig = signature(&c, bound, tol)?;
    io.say(&format!(
        "{} elements of dimension {}, orders searched up to {bound}",
        c.len(),
        c.dim()
    ));
    io.say(sig.table().trim_end());
    let notes = sig.notes.clone();
    io.report("signature", &sig, &notes);
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CompareReport {
    verdict: Distinction,
    a_elements: usize,
    b_elements: usize,
    a_summary: crate::spectral::OrderSummary,
    b_summary: crate::spectral::OrderSummary,
}

fn cmd_compare(io: &mut Io, a: &Path, b: &Path, bound: u64, tol: &Tolerances) -> Result<u8> {
    let ca = load_umeb(a)?;
    let cb = load_umeb(b)?;
    let sa = signature(&ca, bound, tol)?;
    let sb = signature(&cb, bound, tol)?;
    let verdict = compare_signatures(&sa, &sb, tol);
    io.say(&format!("a: {}", a.display()));
    io.say(sa.table().trim_end());
    io.say(&format!("b: {}", b.display()));
    io.say(sb.table().trim_end());
    match verdict {
        Distinction::Distinguished => io.say("DISTINGUISHED"),
        Distinction::NotDistinguished => io.say("NOT DISTINGUISHED (equivalence undecided)"),
    }
    let report = CompareReport {
        verdict,
        a_elements: ca.len(),
        b_elements: cb.len(),
        a_summary: sa.summary.clone(),
        b_summary: sb.summary.clone(),
    };
    let mut notes = sa.notes.clone();
    notes.extend(sb.notes.iter().cloned());
    io.report("comparison", &report, &notes);
    Ok(match verdict {
        Distinction::Distinguished => EXIT_OK,
        Distinction::NotDistinguished => EXIT_NOT_DISTINGUISHED,
    })
}
