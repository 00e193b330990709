//! Command dispatch and deterministic report emission. Every command
//! returns its full output as a string plus an exit code (0 success,
//! 1 consistency failure, 2 usage or parse error), so runs are trivially
//! comparable byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::expr::{parse_param_text, ParamSpec};
use crate::group::{catalog, char_table, DEFAULT_ORDER_BOUND};
use crate::gsp4::{classify, validate_param, CaseLabel, ResidueChar};
use crate::rules::{cross_validate, jh_lookup, predict_from_case, JH_TABLES, PACKET_RULES};
use crate::suite;

pub const VERSION_HEADER: &str = concat!("# wdcalc ", env!("CARGO_PKG_VERSION"));

#[derive(Parser, Debug)]
#[command(name = "wdcalc", version, about = "Exact packet-size calculus for 4-dimensional symplectic-similitude parameters over finite Weil-group models")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Md,
    Json,
}

#[derive(Args, Debug)]
pub struct CommonOpts {
    /// Suppress the version header line.
    #[arg(long, global = true, default_value_t = false)]
    pub no_header: bool,
    /// Output format.
    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ParamInput {
    /// Group context for bare expressions (catalog name).
    #[arg(long)]
    pub group: Option<String>,
    /// Parameter expression: inline text, `@file` (text or JSON), or JSON.
    #[arg(long)]
    pub param: String,
    /// Similitude character (linear index); scanned when omitted.
    #[arg(long)]
    pub sim: Option<usize>,
    /// Declared residue characteristic.
    #[arg(long, value_parser = parse_residue)]
    pub p: Option<ResidueChar>,
}

fn parse_residue(s: &str) -> Result<ResidueChar, String> {
    match s {
        "2" | "two" => Ok(ResidueChar::Two),
        "odd" => Ok(ResidueChar::Odd),
        "unspecified" => Ok(ResidueChar::Unspecified),
        _ => Err("expected 2, odd or unspecified".into()),
    }
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Print the exact character table of a group.
    Chartable {
        #[arg(long)]
        group: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Classify a parameter and print the full report.
    Classify {
        #[command(flatten)]
        input: ParamInput,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Compute the packet size along both paths for a parameter.
    Packet {
        #[command(flatten)]
        input: ParamInput,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Look up the predicted (N, I) for a case label.
    Predict {
        /// Case label, e.g. II or III-a3 or DS-ii.
        label: String,
        /// Side-condition bindings, repeatable: --bind key=value.
        #[arg(long = "bind")]
        bind: Vec<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print the packet-rule and restriction-count tables.
    Tables {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(long, default_value_t = 32)]
        max_group_order: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Enumerate all parameters over the catalog and cross-validate.
    Corpus {
        #[arg(long, default_value_t = 64)]
        max_group_order: usize,
        /// Worker threads (0 = rayon default).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Analyze restrictions to normal subgroups with elementary abelian
    /// 2-group quotient.
    Cliffordsim {
        #[arg(long)]
        group: String,
        /// 1-based index into the candidate subgroup list; all when omitted.
        #[arg(long)]
        subgroup: Option<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// Run a command line (without argv[0]); returns (exit code, output).
pub fn run_from_args<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let mut argv: Vec<std::ffi::OsString> = vec!["wdcalc".into()];
    argv.extend(args.into_iter().map(|a| a.into()));
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => return (2, e.to_string()),
    };
    run(cli)
}

pub fn run(cli: Cli) -> (i32, String) {
    match dispatch(cli) {
        Ok((code, out)) => (code, out),
        Err(e) => {
            let code = match e {
                Error::Parse { .. }
                | Error::ExprType(_)
                | Error::UnknownCatalogGroup(_)
                | Error::UnknownLabel(_)
                | Error::UnboundCondition(_)
                | Error::Io(_)
                | Error::Json(_) => 2,
                _ => 1,
            };
            (code, format!("error: {e}\n"))
        }
    }
}

fn header(out: &mut String, common: &CommonOpts) {
    if !common.no_header {
        let _ = writeln!(out, "{VERSION_HEADER}");
    }
}

fn load_param(input: &ParamInput) -> crate::error::Result<ParamSpec> {
    let text = if let Some(path) = input.param.strip_prefix('@') {
        std::fs::read_to_string(path)?
    } else {
        input.param.clone()
    };
    let trimmed = text.trim_start();
    let mut spec = if trimmed.starts_with('{') {
        serde_json::from_str::<ParamSpec>(&text)?
    } else {
        parse_param_text(&text, input.group.as_deref())?
    };
    if let Some(s) = input.sim {
        spec.sim = Some(s);
    }
    if let Some(p) = input.p {
        spec.p = p;
    }
    Ok(spec)
}

fn dispatch(cli: Cli) -> crate::error::Result<(i32, String)> {
    let mut out = String::new();
    match cli.cmd {
        Cmd::Chartable { group, common } => {
            header(&mut out, &common);
            let g = catalog::by_name(&group)?;
            let t = char_table(&g);
            match common.format {
                Format::Json => {
                    #[derive(serde::Serialize)]
                    struct Row {
                        degree: usize,
                        values: Vec<crate::cyclo::Cyclo>,
                    }
                    #[derive(serde::Serialize)]
                    struct Table {
                        group: String,
                        order: usize,
                        class_sizes: Vec<usize>,
                        class_rep_orders: Vec<u32>,
                        irreps: Vec<Row>,
                    }
                    let table = Table {
                        group: g.name().to_string(),
                        order: g.order(),
                        class_sizes: t.classes.sizes.clone(),
                        class_rep_orders: t
                            .classes
                            .reps
                            .iter()
                            .map(|&r| g.element_order(r as usize))
                            .collect(),
                        irreps: t
                            .irreps
                            .iter()
                            .map(|i| Row {
                                degree: i.degree,
                                values: i.values.clone(),
                            })
                            .collect(),
                    };
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&table)?);
                }
                Format::Md => {
                    let _ = writeln!(out, "## Character table of {} (order {})", g.name(), g.order());
                    let _ = writeln!(out);
                    let mut head = String::from("| irrep | deg |");
                    let mut rule = String::from("|---|---|");
                    for c in 0..t.n_classes() {
                        let _ = write!(
                            head,
                            " {}Cl{}(|{}|) |",
                            "",
                            c,
                            t.classes.sizes[c]
                        );
                        rule.push_str("---|");
                    }
                    let _ = writeln!(out, "{head}");
                    let _ = writeln!(out, "{rule}");
                    for (i, irr) in t.irreps.iter().enumerate() {
                        let mut row = format!("| X{} | {} |", i, irr.degree);
                        for v in &irr.values {
                            let _ = write!(row, " {v} |");
                        }
                        let _ = writeln!(out, "{row}");
                    }
                }
            }
            Ok((0, out))
        }
        Cmd::Classify { input, common } => {
            header(&mut out, &common);
            let spec = load_param(&input)?;
            let (group, phi, sim, residue) = crate::expr::resolve_spec(&spec, DEFAULT_ORDER_BOUND)?;
            let _ = &group;
            let param = validate_default_sim(&phi, sim, residue)?;
            let report = classify(&param)?;
            let cross = cross_validate(&param)?;
            match common.format {
                Format::Json => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&cross)?);
                }
                Format::Md => {
                    render_report_md(&mut out, &report);
                    let _ = writeln!(
                        out,
                        "- prediction: N = {}, |I| = {}, I = {} ({})",
                        cross.predicted_n,
                        cross.predicted_i_order,
                        cross.predicted_i_generators,
                        if cross.ok() { "match" } else { "MISMATCH" }
                    );
                }
            }
            Ok((if cross.ok() { 0 } else { 1 }, out))
        }
        Cmd::Packet { input, common } => {
            header(&mut out, &common);
            let spec = load_param(&input)?;
            let (_, phi, sim, residue) = crate::expr::resolve_spec(&spec, DEFAULT_ORDER_BOUND)?;
            let param = validate_default_sim(&phi, sim, residue)?;
            let sizes = crate::gsp4::packet_size(&param)?;
            match common.format {
                Format::Json => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&sizes)?);
                }
                Format::Md => {
                    let _ = writeln!(out, "N = {}", sizes.n_component_path);
                    let _ = writeln!(
                        out,
                        "- component-group path: r = {} orthogonal isotypics, 2^(r-1) = {}",
                        sizes.r_orthogonal, sizes.n_component_path
                    );
                    let _ = writeln!(
                        out,
                        "- twist path: A = {} times |I| = {} gives {}",
                        sizes.a_size, sizes.i_order, sizes.n_twist_path
                    );
                    let _ = writeln!(
                        out,
                        "- paths agree: {}",
                        if sizes.paths_agree { "yes" } else { "NO" }
                    );
                }
            }
            Ok((if sizes.paths_agree { 0 } else { 1 }, out))
        }
        Cmd::Predict { label, bind, common } => {
            header(&mut out, &common);
            let label: CaseLabel = label.parse()?;
            let mut bindings = BTreeMap::new();
            for b in bind {
                let (k, v) = b
                    .split_once('=')
                    .ok_or_else(|| Error::UnboundCondition(b.clone()))?;
                bindings.insert(k.to_string(), v.to_string());
            }
            let (n, i, gens) = predict_from_case(label, &bindings)?;
            match common.format {
                Format::Json => {
                    let _ = writeln!(
                        out,
                        "{}",
                        serde_json::json!({ "label": label.to_string(), "n": n, "i_order": i, "i_generators": gens })
                    );
                }
                Format::Md => {
                    let _ = writeln!(out, "{label}: N = {n}, |I| = {i}, I = {gens}");
                }
            }
            Ok((0, out))
        }
        Cmd::Tables { common } => {
            header(&mut out, &common);
            match common.format {
                Format::Json => {
                    let _ = writeln!(
                        out,
                        "{}",
                        serde_json::to_string_pretty(&serde_json::json!({
                            "packet_rules": &*PACKET_RULES,
                            "restriction_tables": &*JH_TABLES,
                        }))?
                    );
                }
                Format::Md => {
                    let _ = writeln!(out, "## Packet-size rules\n");
                    let _ = writeln!(out, "| label | conditions | N | \\|I\\| | I | provenance |");
                    let _ = writeln!(out, "|---|---|---|---|---|---|");
                    for r in PACKET_RULES.iter() {
                        let conds = if r.conditions.is_empty() {
                            "-".to_string()
                        } else {
                            r.conditions
                                .iter()
                                .map(|(k, v)| format!("{k}={v}"))
                                .collect::<Vec<_>>()
                                .join(", ")
                        };
                        let _ = writeln!(
                            out,
                            "| {} | {} | {} | {} | {} | {} |",
                            r.label, conds, r.n, r.i_order, r.i_generators, r.provenance
                        );
                    }
                    for t in JH_TABLES.iter() {
                        let _ = writeln!(out, "\n## {}\n", t.title);
                        let _ = writeln!(out, "| family | condition | count |");
                        let _ = writeln!(out, "|---|---|---|");
                        for row in &t.rows {
                            let _ = writeln!(
                                out,
                                "| {} | {} | {} |",
                                row.family, row.condition, row.count
                            );
                        }
                    }
                }
            }
            let _ = jh_lookup; // referenced by tests through the library
            Ok((0, out))
        }
        Cmd::Verify {
            max_group_order,
            common,
        } => {
            header(&mut out, &common);
            let results = suite::verify_suite(max_group_order)?;
            let ok = results.iter().all(|r| r.pass);
            match common.format {
                Format::Json => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&results)?);
                }
                Format::Md => {
                    for r in &results {
                        let _ = writeln!(
                            out,
                            "{} {} ({})",
                            if r.pass { "PASS" } else { "FAIL" },
                            r.name,
                            r.detail
                        );
                    }
                }
            }
            Ok((if ok { 0 } else { 1 }, out))
        }
        Cmd::Corpus {
            max_group_order,
            jobs,
            common,
        } => {
            header(&mut out, &common);
            let body = |max_group_order: usize| -> crate::error::Result<(i32, String)> {
                let mut out = String::new();
                let reports = suite::corpus(max_group_order)?;
                let checks = suite::corpus_checks(&reports);
                let ok = checks.iter().all(|c| c.pass);
                match common.format {
                    Format::Json => {
                        let _ = writeln!(
                            out,
                            "{}",
                            serde_json::to_string_pretty(&serde_json::json!({
                                "entries": reports,
                                "checks": checks,
                            }))?
                        );
                    }
                    Format::Md => {
                        for r in &reports {
                            let _ = writeln!(
                                out,
                                "{}\t{}\t{}\tN={}\t|I|={}\t{}",
                                r.report.param_key(),
                                r.report.case_label,
                                bindings_compact(&r.report.bindings),
                                r.report.n_packet,
                                r.report.i_order,
                                if r.ok() { "ok" } else { "MISMATCH" }
                            );
                        }
                        let mut by_label: BTreeMap<String, usize> = BTreeMap::new();
                        for r in &reports {
                            *by_label
                                .entry(r.report.case_label.to_string())
                                .or_default() += 1;
                        }
                        let _ = writeln!(out, "\n## Summary");
                        let _ = writeln!(out, "- parameters: {}", reports.len());
                        for (label, count) in &by_label {
                            let _ = writeln!(out, "- {label}: {count}");
                        }
                        for c in &checks {
                            let _ = writeln!(
                                out,
                                "- {} {}: {}",
                                if c.pass { "PASS" } else { "FAIL" },
                                c.name,
                                c.detail
                            );
                        }
                    }
                }
                Ok((if ok { 0 } else { 1 }, out))
            };
            let (code, body_out) = if jobs > 0 {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build()
                    .map_err(|e| Error::Io(e.to_string()))?;
                pool.install(|| body(max_group_order))?
            } else {
                body(max_group_order)?
            };
            out.push_str(&body_out);
            Ok((code, out))
        }
        Cmd::Cliffordsim {
            group,
            subgroup,
            common,
        } => {
            header(&mut out, &common);
            let g = catalog::by_name(&group)?;
            let pairs = crate::clifford::candidate_pairs(&g);
            let selected: Vec<_> = match subgroup {
                Some(i) => pairs
                    .get(i - 1)
                    .cloned()
                    .map(|s| vec![s])
                    .ok_or_else(|| Error::Invariant(format!("subgroup {i} out of range")))?,
                None => pairs,
            };
            let mut all = Vec::new();
            for h in &selected {
                all.push(crate::clifford::restrict_analyze(&g, h)?);
            }
            match common.format {
                Format::Json => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&all)?);
                }
                Format::Md => {
                    for rep in &all {
                        let _ = writeln!(
                            out,
                            "## {} / H = {:?} (quotient order {})",
                            rep.group, rep.subgroup_members, rep.quotient_order
                        );
                        for e in &rep.per_irrep {
                            let _ = writeln!(
                                out,
                                "- X{} (deg {}): {} constituents, mult-free {}, |I_H| {}{}",
                                e.irrep,
                                e.degree,
                                e.constituents.len(),
                                e.multiplicity_free,
                                e.twists.len(),
                                match &e.orbit {
                                    Some(o) =>
                                        format!(
                                            ", lemmas {}",
                                            if o.count_matches_twists && o.simply_transitive {
                                                "hold"
                                            } else {
                                                "FAIL"
                                            }
                                        ),
                                    None => ", hypothesis fails (not multiplicity free)".into(),
                                }
                            );
                        }
                    }
                }
            }
            let ok = all.iter().all(|r| r.all_lemmas_hold());
            Ok((if ok { 0 } else { 1 }, out))
        }
    }
}

/// Validate with the spec'd default: when several similitudes are valid
/// and none was selected, take the canonically smallest; the report still
/// lists every candidate.
fn validate_default_sim(
    phi: &crate::wd::WdRep,
    sim: Option<usize>,
    residue: ResidueChar,
) -> crate::error::Result<crate::gsp4::Gsp4Param> {
    match validate_param(phi, sim, residue) {
        Err(Error::AmbiguousSim(cands)) => validate_param(phi, Some(cands[0]), residue),
        other => other,
    }
}

fn bindings_compact(b: &BTreeMap<String, String>) -> String {
    if b.is_empty() {
        "-".to_string()
    } else {
        b.iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn render_report_md(out: &mut String, r: &crate::gsp4::ClassReport) {
    let _ = writeln!(out, "## Parameter over {}", r.group);
    let terms: Vec<String> = r
        .phi_terms
        .iter()
        .map(|t| format!("(irrep {} box S{}) x{}", t.irrep, t.n, t.mult))
        .collect();
    let _ = writeln!(out, "- phi: {}", terms.join(" + "));
    let _ = writeln!(
        out,
        "- sim: linear {} (valid candidates {:?})",
        r.sim, r.sim_candidates
    );
    let _ = writeln!(out, "- case: {}", r.case_label);
    let _ = writeln!(out, "- bindings: {} [{}]", bindings_compact(&r.bindings), r.binding_source);
    let std: Vec<String> = r
        .std_decomposition
        .iter()
        .map(|p| {
            format!(
                "(irrep {} deg {} box S{}) x{} [{}]",
                p.irrep,
                p.degree,
                p.n,
                p.mult,
                match (p.self_dual, p.rep_type) {
                    (false, _) => "not self-dual",
                    (true, crate::wd::SelfDualType::Orthogonal) => "orthogonal",
                    (true, crate::wd::SelfDualType::Symplectic) => "symplectic",
                    (true, crate::wd::SelfDualType::Complex) => "complex",
                }
            )
        })
        .collect();
    let _ = writeln!(out, "- std: {}", std.join(" + "));
    let _ = writeln!(
        out,
        "- N = {} (r = {}, A = {}, |I| = {}, I = {:?})",
        r.n_packet, r.r_orthogonal, r.a_phi_size, r.i_order, r.i_phi
    );
    if let Some(e) = &r.witnesses.e_subgroup {
        let _ = writeln!(out, "- witness E: members {e:?}, sigma {:?}, chi {:?}", r.witnesses.sigma, r.witnesses.chi);
    }
    if let Some(k) = &r.witnesses.k_subgroup {
        let _ = writeln!(out, "- witness K: members {k:?}");
    }
    if r.witnesses.pi.is_some() || r.witnesses.lambda.is_some() {
        let _ = writeln!(
            out,
            "- witness factorization: pi {:?}, lambda {:?}",
            r.witnesses.pi, r.witnesses.lambda
        );
    }
    for c in &r.consistency {
        let _ = writeln!(
            out,
            "- check {}: {} {}",
            c.name,
            if c.pass { "pass" } else { "FAIL" },
            c.detail
        );
    }
    for w in &r.warnings {
        let _ = writeln!(out, "- warning: {w}");
    }
}
