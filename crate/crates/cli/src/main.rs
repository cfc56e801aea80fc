use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use weilrep::arith::{fmt_rational, int, parse_rational, Rational};
use weilrep::io::{self, JacobiRow};
use weilrep::series::{self, exponents, SeriesRequest, Variant};
use weilrep::spaces::{self, BasisOptions, Generator, SpaceBasis, SpaceKind};
use weilrep::{DiscriminantGroup, Error, Result};

/// Coefficient tables of vector-valued modular forms attached to an even
/// lattice.
#[derive(Parser)]
#[command(name = "weilrep", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// dim M_k(ρ*) and dim S_k(ρ*)
    Dim(Common),
    /// Eisenstein series E_{k,0}
    Eis(Common),
    /// Poincaré square series Q_{k,m,β}
    Qseries(Common),
    /// Jacobi Eisenstein series E_{k,m,β}(τ,z), one row per (γ, n, r)
    Jacobi(Common),
    /// Basis of M_k(ρ*)
    Basis(Common),
    /// Basis of S_k(ρ*)
    Cuspbasis(Common),
    /// Eisenstein series E_β for the isotropic classes
    Eisfamily(Common),
    /// Obstructions to a principal part of weight --weight (pairs with weight 2 − w)
    Obstruct(Common),
    /// Nearly-holomorphic form with a given principal part
    Nearhol(Common),
    /// Petersson product (f, Q_{k,m,β}) by partial sums
    Petersson(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Args)]
struct Common {
    /// Lattice file: {"gram": [[...]]}
    lattice: PathBuf,
    /// Weight, e.g. 3 or 5/2
    #[arg(long, allow_hyphen_values = true)]
    weight: String,
    #[arg(long, default_value = "1")]
    m: String,
    /// β in dual-basis coordinates, e.g. 1/4,0
    #[arg(long, default_value = "")]
    beta: String,
    /// Coefficients q^n with n < prec
    #[arg(long, default_value = "3")]
    prec: String,
    /// Number of terms in Petersson partial sums
    #[arg(long, default_value_t = 150)]
    terms: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Discriminant convention: remark21 (generic local factors, default) or
    /// prop32 (closed formula as written, no factor 2)
    #[arg(long, default_value = "remark21")]
    variant: String,
    /// Principal part rows (JSON or TSV)
    #[arg(long)]
    pp: Option<PathBuf>,
    /// Rows of the nearly-holomorphic form beyond the poles
    #[arg(long, default_value_t = 4)]
    rows: i64,
    /// Cusp form for `petersson`, as a combination term COEF:E[:β] or
    /// COEF:Q:m[:β]; repeatable
    #[arg(long = "term", allow_hyphen_values = true)]
    terms_f: Vec<String>,
    /// Cusp form for `petersson` as a table file instead of --term
    #[arg(long)]
    form: Option<PathBuf>,
}

struct Ctx {
    group: Arc<DiscriminantGroup>,
    weight: Rational,
    variant: Variant,
}

impl Ctx {
    fn new(c: &Common) -> Result<Self> {
        let lattice = io::read_lattice(&c.lattice)?;
        let weight = parse_weight(&c.weight)?;
        Ok(Ctx { group: Arc::new(DiscriminantGroup::new(&lattice)?), weight, variant: c.variant.parse()? })
    }

    fn beta(&self, s: &str) -> Result<usize> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(0);
        }
        let coords: Vec<Rational> = s.split(',').map(parse_rational).collect::<Result<_>>()?;
        self.group.index_of(&coords)
    }

    fn options(&self) -> BasisOptions {
        BasisOptions { variant: self.variant, ..Default::default() }
    }
}

/// Integers or halves written `a/2`; decimals are refused by the parser.
fn parse_weight(s: &str) -> Result<Rational> {
    let w = parse_rational(s)?;
    if *w.denom() > 2.into() {
        return Err(Error::Input(format!("weight {s} is not a multiple of 1/2")));
    }
    Ok(w)
}

/// Six significant digits; scientific notation outside `[1e-4, 1e6)`.
fn six_digits(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if (1e-4..1e6).contains(&a) {
        let decimals = (5 - a.log10().floor() as i32).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}

fn table(f: &weilrep::FourierExpansion, fmt: Format) -> String {
    let rows = io::rows(f);
    match fmt {
        Format::Json => io::to_json(&rows),
        Format::Tsv => io::rows_to_tsv(&rows),
    }
}

fn labelled_tables(forms: &[(String, &weilrep::FourierExpansion)], fmt: Format) -> String {
    match fmt {
        Format::Json => {
            let v: Vec<serde_json::Value> = forms.iter().map(|(l, f)| json!({"form": l, "rows": io::rows(f)})).collect();
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
        Format::Tsv => {
            let mut s = String::from("form\tgamma\tn\tc\n");
            for (l, f) in forms {
                for r in io::rows(f) {
                    s.push_str(&format!("{l}\t{}\t{}\t{}\n", r.gamma, r.n, r.c));
                }
            }
            s
        }
    }
}

fn basis_output(ctx: &Ctx, b: &SpaceBasis, fmt: Format) -> String {
    let labels: Vec<String> = b
        .provenance
        .iter()
        .map(|combo| combo.iter().map(|(a, g)| format!("{}*{}", fmt_rational(a), g.label(&ctx.group))).collect::<Vec<_>>().join(" + "))
        .collect();
    let forms: Vec<(String, &weilrep::FourierExpansion)> = labels.into_iter().zip(&b.expansions).collect();
    labelled_tables(&forms, fmt)
}

fn parse_term(ctx: &Ctx, s: &str) -> Result<(Rational, Generator)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Input(format!("term {s:?} is not COEF:E[:β] or COEF:Q:m[:β]"));
    let coef = parse_rational(parts.first().ok_or_else(bad)?)?;
    let gen = match parts.get(1).copied() {
        Some("E") if parts.len() <= 3 => Generator::Eisenstein(ctx.beta(parts.get(2).unwrap_or(&""))?),
        Some("Q") if (3..=4).contains(&parts.len()) => {
            Generator::Q { m: parse_rational(parts[2])?, beta: ctx.beta(parts.get(3).unwrap_or(&""))? }
        }
        _ => return Err(bad()),
    };
    Ok((coef, gen))
}

fn read_pp(ctx: &Ctx, c: &Common) -> Result<spaces::PrincipalPart> {
    let path = c.pp.as_ref().ok_or_else(|| Error::Input("--pp is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    io::parse_principal_part(&ctx.group, ctx.weight.clone(), &text)
}

fn run(cmd: Cmd) -> Result<String> {
    match cmd {
        Cmd::Dim(c) => {
            let ctx = Ctx::new(&c)?;
            let (m, s) = spaces::dimension(&ctx.group, &ctx.weight)?;
            Ok(format!("dim_M {m}\ndim_S {s}\n"))
        }
        Cmd::Eis(c) => {
            let ctx = Ctx::new(&c)?;
            Ok(table(&series::eisenstein_expansion(&ctx.group, &ctx.weight, &parse_rational(&c.prec)?)?, c.format))
        }
        Cmd::Qseries(c) => {
            let ctx = Ctx::new(&c)?;
            let req = SeriesRequest::new(ctx.group.clone(), ctx.weight.clone(), parse_rational(&c.m)?, ctx.beta(&c.beta)?, parse_rational(&c.prec)?)?
                .with_variant(ctx.variant);
            Ok(table(&series::qseries_expansion(&req)?, c.format))
        }
        Cmd::Jacobi(c) => {
            let ctx = Ctx::new(&c)?;
            let prec = parse_rational(&c.prec)?;
            let req = SeriesRequest::new(ctx.group.clone(), ctx.weight.clone(), parse_rational(&c.m)?, ctx.beta(&c.beta)?, prec.clone())?
                .with_variant(ctx.variant);
            let mut rows = Vec::new();
            for g in 0..ctx.group.order {
                for n in exponents(&ctx.group, g, &int(0), &prec) {
                    for r in series::r_range(&req, &n, g, false) {
                        let v = series::jacobi_coefficient(&req, &n, &r, g)?;
                        rows.push(JacobiRow {
                            gamma: ctx.group.element(g).label(),
                            n: fmt_rational(&n),
                            r: fmt_rational(&r),
                            c: fmt_rational(&v),
                        });
                    }
                }
            }
            Ok(match c.format {
                Format::Json => io::to_json(&rows),
                Format::Tsv => io::jacobi_to_tsv(&rows),
            })
        }
        Cmd::Basis(c) => {
            let ctx = Ctx::new(&c)?;
            let b = spaces::build_basis(&ctx.group, &ctx.weight, SpaceKind::Full, &ctx.options())?;
            Ok(basis_output(&ctx, &b, c.format))
        }
        Cmd::Cuspbasis(c) => {
            let ctx = Ctx::new(&c)?;
            let b = spaces::build_basis(&ctx.group, &ctx.weight, SpaceKind::Cusp, &ctx.options())?;
            Ok(basis_output(&ctx, &b, c.format))
        }
        Cmd::Eisfamily(c) => {
            let ctx = Ctx::new(&c)?;
            let fam = spaces::eisenstein_family(&ctx.group, &ctx.weight, &parse_rational(&c.prec)?)?;
            let forms: Vec<(String, &weilrep::FourierExpansion)> =
                fam.members.iter().map(|(b, f)| (Generator::Eisenstein(*b).label(&ctx.group), f)).collect();
            let out = labelled_tables(&forms, c.format);
            if fam.unresolved.is_empty() {
                Ok(out)
            } else {
                emit(&out);
                let names: Vec<String> = fam.unresolved.iter().map(|b| ctx.group.element(*b).label()).collect();
                Err(Error::Unresolved(format!("only combined sums are determined at ({})", names.join("), ("))))
            }
        }
        Cmd::Obstruct(c) => {
            let ctx = Ctx::new(&c)?;
            let pp = read_pp(&ctx, &c)?;
            let rep = spaces::obstruction_check(&pp, &(int(2) - &ctx.weight), &ctx.options())?;
            let pairings: Vec<serde_json::Value> =
                rep.pairings.iter().map(|(l, v)| json!({"form": l, "pairing": fmt_rational(v)})).collect();
            let implied: Vec<serde_json::Value> =
                rep.implied_constants.iter().map(|(l, v)| json!({"gamma": l, "n": "0", "c": fmt_rational(v)})).collect();
            Ok(match c.format {
                Format::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({
                        "feasible": rep.feasible,
                        "pairings": pairings,
                        "violations": rep.violations,
                        "implied_constants": implied,
                    }))
                    .unwrap()
                ),
                Format::Tsv => {
                    let mut s = format!("feasible\t{}\n", rep.feasible);
                    for (l, v) in &rep.pairings {
                        s.push_str(&format!("pairing\t{l}\t{}\n", fmt_rational(v)));
                    }
                    for (l, v) in &rep.implied_constants {
                        s.push_str(&format!("constant\t{l}\t{}\n", fmt_rational(v)));
                    }
                    s
                }
            })
        }
        Cmd::Nearhol(c) => {
            let ctx = Ctx::new(&c)?;
            let pp = read_pp(&ctx, &c)?;
            Ok(table(&spaces::nearly_holomorphic(&pp, c.rows, &ctx.options())?, c.format))
        }
        Cmd::Petersson(c) => {
            let ctx = Ctx::new(&c)?;
            let m = parse_rational(&c.m)?;
            let beta = ctx.beta(&c.beta)?;
            let value = match &c.form {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
                    let rows = if text.trim_start().starts_with('[') { io::rows_from_json(&text)? } else { io::rows_from_tsv(&text)? };
                    let f = io::expansion_from_rows(&ctx.group, ctx.weight.clone(), int(0), &rows)?;
                    spaces::petersson_product(&f, &m, beta, c.terms)?
                }
                None => {
                    if c.terms_f.is_empty() {
                        return Err(Error::Input("give the cusp form with --term or --form".into()));
                    }
                    let f: Vec<(Rational, Generator)> = c.terms_f.iter().map(|t| parse_term(&ctx, t)).collect::<Result<_>>()?;
                    spaces::petersson_combinations(&ctx.group, &ctx.weight, &f, &[(int(1), Generator::Q { m, beta })], c.terms, ctx.variant)?
                }
            };
            Ok(match c.format {
                Format::Json => format!("{}\n", json!({"petersson": six_digits(value), "terms": c.terms})),
                Format::Tsv => format!("petersson\t{}\nterms\t{}\n", six_digits(value), c.terms),
            })
        }
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(out: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = std::env::var("WEILREP_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.cmd) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_mathematical() { 2 } else { 1 })
        }
    }
}
