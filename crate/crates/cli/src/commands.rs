use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use crate::args::{Common, FormKind};
use crate::output::{Artifact, RunConfig};
use rumin_core::complex::{
    certify, dc_order, CertificationReport, E0BasisJson, OperatorMatrix, OperatorMatrixJson,
    RuminComplex,
};
use rumin_core::exec::Exec;
use rumin_core::numerics::Grid;
use rumin_core::numerics::{
    decomposition_decay, default_gn_base, dilation_sweep, gn_levels, gn_stability,
    ConvergenceReport, DilationReport, GnCase, GnStability, GridDecompositionReport, ProbeConfig,
    TestForm, TestFormJson, GN_HALF_WIDTH,
};
use rumin_core::symbol::{
    certify_symbols, check_injective, extract_symbol, is_left_inverse, left_inverse,
    pierre_decompose, DecompositionJson, LeftInverseJson, PolyForm, PolyFormJson, SymbolJson,
};

const MAX_SYMBOLIC_N: usize = 4;
const MAX_NUMERIC_N: usize = 2;

fn symbolic_n(c: &Common) -> Result<usize> {
    let n = c.n.unwrap_or(1);
    ensure!(
        (1..=MAX_SYMBOLIC_N).contains(&n),
        "n = {n} is outside the supported range 1..={MAX_SYMBOLIC_N}"
    );
    Ok(n)
}

fn numeric_n(n: usize) -> Result<usize> {
    ensure!(
        (1..=MAX_NUMERIC_N).contains(&n),
        "n = {n} is outside the numerical range 1..={MAX_NUMERIC_N}"
    );
    Ok(n)
}

fn complex(n: usize) -> Result<RuminComplex> {
    RuminComplex::build(n, Exec::default())
        .map_err(|e| anyhow!("assembling the complex for n = {n}: {e}"))
}

fn config(command: &str, common: &Common, n: Vec<usize>, degree: Option<usize>) -> RunConfig {
    RunConfig {
        command: command.into(),
        n,
        degree,
        seed: common.seed,
        ..Default::default()
    }
}

fn check_degree(n: usize, h: usize, max: usize) -> Result<()> {
    ensure!(
        h <= max,
        "degree {h} is out of range for n = {n} (at most {max})"
    );
    Ok(())
}

fn failures(report: &CertificationReport) -> Vec<String> {
    report
        .failures()
        .map(|f| match f.degree {
            Some(h) => format!("{} n={} h={}: {}", f.name, f.n, h, f.detail),
            None => format!("{} n={}: {}", f.name, f.n, f.detail),
        })
        .collect()
}

#[derive(Serialize)]
struct DimsResult {
    n: usize,
    dims: Vec<usize>,
    symmetric: bool,
    /// `Σ_{h ≤ n} dim E₀ʰ` against `Σ_{h ≤ n} (C(2n,h) − C(2n,h−2))`.
    lower_half_sum: usize,
    binomial_sum: usize,
}

fn binomial(m: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (m - i) / (i + 1))
}

pub fn dims(common: &Common) -> Result<Artifact> {
    let n = symbolic_n(common)?;
    let top = 2 * n + 1;
    let dims: Vec<usize> = (0..=top)
        .map(|h| rumin_core::complex::e0_basis(n, h).map(|b| b.dim()))
        .collect::<rumin_core::Result<_>>()?;
    let binomial_sum = (0..=n)
        .map(|h| binomial(2 * n, h) - if h >= 2 { binomial(2 * n, h - 2) } else { 0 })
        .sum();
    let result = DimsResult {
        n,
        symmetric: (0..=top).all(|h| dims[h] == dims[top - h]),
        lower_half_sum: dims[..=n].iter().sum(),
        binomial_sum,
        dims,
    };
    let mut a = Artifact::new(
        format!("dims_n{n}"),
        &config("dims", common, vec![n], None),
        &result,
    )?;
    let mut csv = String::from("h,dim\n");
    for (h, d) in result.dims.iter().enumerate() {
        writeln!(csv, "{h},{d}")?;
    }
    a.csv = Some(csv);
    let cols = "c".repeat(result.dims.len());
    let hs: Vec<String> = (0..=top).map(|h| h.to_string()).collect();
    let ds: Vec<String> = result.dims.iter().map(|d| d.to_string()).collect();
    a.latex = Some(format!(
        "\\begin{{tabular}}{{l|{cols}}}\n$h$ & {} \\\\\n\\hline\n$\\dim E_0^h$ & {} \\\\\n\\end{{tabular}}\n",
        hs.join(" & "),
        ds.join(" & ")
    ));
    Ok(a)
}

#[derive(Serialize)]
struct BasisResult {
    n: usize,
    bases: Vec<E0BasisJson>,
}

pub fn basis(common: &Common) -> Result<Artifact> {
    let n = symbolic_n(common)?;
    let top = 2 * n + 1;
    let degrees: Vec<usize> = match common.degree {
        Some(h) => {
            check_degree(n, h, top)?;
            vec![h]
        }
        None => (0..=top).collect(),
    };
    let bases = degrees
        .iter()
        .map(|&h| rumin_core::complex::e0_basis(n, h).map(|b| b.to_json()))
        .collect::<rumin_core::Result<_>>()?;
    let stem = match common.degree {
        Some(h) => format!("basis_n{n}_h{h}"),
        None => format!("basis_n{n}"),
    };
    Artifact::new(
        stem,
        &config("basis", common, vec![n], common.degree),
        &BasisResult { n, bases },
    )
}

#[derive(Serialize)]
struct DcResult {
    n: usize,
    degree: usize,
    target_degree: usize,
    homogeneity: u32,
    dc: OperatorMatrixJson,
    /// `δ_c` from degree `h + 1` back to `h`.
    delta_c: OperatorMatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    laplacian: Option<OperatorMatrixJson>,
    certification: CertificationReport,
    passed: bool,
}

pub fn dc(common: &Common, with_laplacian: bool) -> Result<Artifact> {
    let n = symbolic_n(common)?;
    let h = common.degree.unwrap_or(0);
    check_degree(n, h, 2 * n)?;
    let c = complex(n)?;
    let full = certify(&c, false);
    let certification = CertificationReport {
        checks: full
            .checks
            .into_iter()
            .filter(|k| k.degree.is_none() || k.degree == Some(h) || k.degree == Some(h + 1))
            .collect(),
    };
    let laplacian = if with_laplacian {
        Some(c.laplacian(h)?.to_json())
    } else {
        None
    };
    let result = DcResult {
        n,
        degree: h,
        target_degree: h + 1,
        homogeneity: dc_order(n, h),
        dc: c.dc(h).to_json(),
        delta_c: c.delta_c(h + 1).to_json(),
        laplacian,
        passed: certification.all_passed(),
        certification,
    };
    let mut a = Artifact::new(
        format!("dc_n{n}_h{h}"),
        &config("dc", common, vec![n], Some(h)),
        &result,
    )?;
    a.failures = failures(&result.certification);
    a.latex = Some(format!(
        "% d_c : E_0^{h} -> E_0^{} on H^{n}, homogeneous of degree {}\n\\[\nd_c = {}\n\\]\n",
        h + 1,
        result.homogeneity,
        c.dc(h).to_latex()
    ));
    let mut csv = String::from("row,col,exponents,numerator,denominator\n");
    for (r, row) in result.dc.entries.iter().enumerate() {
        for (col, terms) in row.iter().enumerate() {
            for (e, num, den) in terms {
                let e: Vec<String> = e.iter().map(|v| v.to_string()).collect();
                writeln!(csv, "{r},{col},{},{num},{den}", e.join(" "))?;
            }
        }
    }
    a.csv = Some(csv);
    Ok(a)
}

#[derive(Serialize)]
struct VerifyResult {
    n: Vec<usize>,
    replaced: Option<String>,
    checks: usize,
    failed: usize,
    passed: bool,
    report: CertificationReport,
}

pub fn verify(common: &Common, check_file: Option<&Path>, maps: usize) -> Result<Artifact> {
    let replacement = match check_file {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let j: OperatorMatrixJson =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            Some(OperatorMatrix::from_json(&j)?)
        }
        None => None,
    };
    let mut ns: Vec<usize> = match common.n {
        Some(_) => vec![symbolic_n(common)?],
        None => vec![1, 2, 3],
    };
    if let Some(m) = &replacement {
        if !ns.contains(&m.n()) {
            ns.push(m.n());
        }
    }
    let mut report = CertificationReport::default();
    for &n in &ns {
        let mut c = complex(n)?;
        if let Some(m) = replacement.as_ref().filter(|m| m.n() == n) {
            c.replace_dc(m.source_degree(), m.clone())?;
        }
        report.extend(certify(&c, true));
        report.extend(certify_symbols(&c, maps, common.seed));
    }
    let failed = report.failures().count();
    let result = VerifyResult {
        n: ns.clone(),
        replaced: replacement
            .as_ref()
            .map(|m| format!("d_c on degree {} of n = {}", m.source_degree(), m.n())),
        checks: report.checks.len(),
        failed,
        passed: failed == 0,
        report,
    };
    let mut cfg = config("verify", common, ns, None);
    cfg.input = check_file.map(|p| p.display().to_string());
    let mut a = Artifact::new("verify".into(), &cfg, &result)?;
    a.failures = failures(&result.report);
    let mut csv = String::from("check,n,degree,passed,detail\n");
    for k in &result.report.checks {
        let degree = k.degree.map(|h| h.to_string()).unwrap_or_default();
        writeln!(
            csv,
            "{},{},{},{},\"{}\"",
            k.name,
            k.n,
            degree,
            k.passed,
            k.detail.replace('"', "'")
        )?;
    }
    a.csv = Some(csv);
    Ok(a)
}

#[derive(Serialize)]
struct SymbolEntry {
    degree: usize,
    symbol: SymbolJson,
    rank: usize,
    injective: bool,
    left_inverse: Option<LeftInverseJson>,
    left_inverse_exact: bool,
}

#[derive(Serialize)]
struct SymbolResult {
    n: usize,
    symbols: Vec<SymbolEntry>,
}

pub fn symbol(common: &Common) -> Result<Artifact> {
    let n = symbolic_n(common)?;
    let c = complex(n)?;
    let degrees: Vec<usize> = match common.degree {
        Some(h) => {
            check_degree(n, h, 2 * n)?;
            vec![h]
        }
        None => (0..c.top()).collect(),
    };
    let mut symbols = Vec::new();
    let mut bad = Vec::new();
    for h in degrees {
        let s = extract_symbol(c.dc(h))?;
        let (rank, injective) = check_injective(&s);
        let b = left_inverse(&s, c.basis(h + 1)).ok();
        let exact = b.as_ref().is_some_and(|b| is_left_inverse(b, &s));
        if !(injective && exact) {
            bad.push(format!(
                "symbol n={n} h={h}: rank {rank}, exact left inverse {exact}"
            ));
        }
        symbols.push(SymbolEntry {
            degree: h,
            symbol: s.to_json(),
            rank,
            injective,
            left_inverse: b.map(|b| b.to_json()),
            left_inverse_exact: exact,
        });
    }
    let stem = match common.degree {
        Some(h) => format!("symbol_n{n}_h{h}"),
        None => format!("symbol_n{n}"),
    };
    let mut a = Artifact::new(
        stem,
        &config("symbol", common, vec![n], common.degree),
        &SymbolResult { n, symbols },
    )?;
    a.failures = bad;
    Ok(a)
}

/// A closed polynomial form, or a test form `u` whose `f = d_c u` is studied on grids.
#[derive(Deserialize)]
#[serde(untagged)]
enum DecomposeInput {
    Symbolic(PolyFormJson),
    Grid(TestFormJson),
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum DecomposeResult {
    Symbolic {
        decomposition: DecompositionJson,
    },
    Grid {
        n: usize,
        degree: usize,
        report: GridDecompositionReport,
    },
}

pub fn decompose(common: &Common, input: &Path) -> Result<Artifact> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let parsed: DecomposeInput = serde_json::from_str(&text).with_context(|| {
        format!(
            "{} is neither a polynomial form nor a test form",
            input.display()
        )
    })?;
    let (n, h, result) = match parsed {
        DecomposeInput::Symbolic(j) => {
            let alpha = PolyForm::from_json(&j)?;
            let (n, h) = (alpha.n(), alpha.degree());
            ensure!(
                (1..=MAX_SYMBOLIC_N).contains(&n),
                "n = {n} is outside the supported range"
            );
            check_degree(n, h, 2 * n)?;
            let c = complex(n)?;
            ensure!(
                alpha.dim() == c.basis(h).dim(),
                "form has {} coefficients, E0^{h} has dimension {}",
                alpha.dim(),
                c.basis(h).dim()
            );
            let d = pierre_decompose(&alpha, c.dc(h), c.basis(h), c.basis(h + 1))
                .map_err(|e| anyhow!("input rejected: {e}"))?;
            (
                n,
                h,
                DecomposeResult::Symbolic {
                    decomposition: d.to_json(),
                },
            )
        }
        DecomposeInput::Grid(j) => {
            let u = TestForm::from_json(&j)?;
            let n = numeric_n(u.n())?;
            let h = u.degree() + 1;
            check_degree(n, h, 2 * n)?;
            let c = complex(n)?;
            ensure!(
                u.dim() == c.basis(u.degree()).dim(),
                "test form has {} components, E0^{} has dimension {}",
                u.dim(),
                u.degree(),
                c.basis(u.degree()).dim()
            );
            let mut cfg = ProbeConfig::default_for(n)?;
            cfg.seed = common.seed;
            if let Some(k) = common.grid_nodes {
                cfg.base = Grid::with_nodes(n, cfg.base.half_xy, k)?;
            }
            if let Some(r) = common.refinements {
                cfg.levels = r + 1;
            }
            let report = decomposition_decay(&c, h, &u, &cfg)?;
            (
                n,
                h,
                DecomposeResult::Grid {
                    n,
                    degree: h,
                    report,
                },
            )
        }
    };
    let mut cfg = config("decompose", common, vec![n], Some(h));
    cfg.input = input.file_name().map(|f| f.to_string_lossy().into_owned());
    let mut a = Artifact::new(format!("decompose_n{n}_h{h}"), &cfg, &result)?;
    if let DecomposeResult::Grid { report, .. } = &result {
        let mut csv = format!("{}\n", ConvergenceReport::csv_header());
        for row in report.divergence.csv_rows() {
            writeln!(csv, "{row}")?;
        }
        a.csv = Some(csv);
    }
    Ok(a)
}

#[derive(Serialize)]
struct GnResult {
    n: usize,
    degree: usize,
    case: GnCase,
    q: usize,
    exponent_label: String,
    warnings: Vec<String>,
    stability: GnStability,
    /// Dilation sweep on the coarsest grid.
    dilation: Vec<DilationReport>,
    dilation_passed: bool,
}

pub fn gn(
    common: &Common,
    kind: FormKind,
    form_file: Option<&Path>,
    tolerance: f64,
) -> Result<Artifact> {
    let (tf, form) = match form_file {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let j: TestFormJson =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            (
                TestForm::from_json(&j)?,
                p.file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            )
        }
        None => {
            let n = numeric_n(common.n.unwrap_or(1))?;
            let h = common.degree.unwrap_or(0);
            check_degree(n, h, 2 * n + 1)?;
            let dim = rumin_core::complex::e0_dimension(n, h);
            let tf = match kind {
                FormKind::Bump => TestForm::bump(n, h, dim),
                FormKind::Standard => TestForm::standard(n, h, dim),
            };
            (tf, format!("{kind:?}").to_lowercase())
        }
    };
    let (n, h) = (numeric_n(tf.n())?, tf.degree());
    let c = complex(n)?;
    ensure!(
        tf.dim() == c.basis(h).dim(),
        "test form has {} components, E0^{h} has dimension {}",
        tf.dim(),
        c.basis(h).dim()
    );
    let base = common.grid_nodes.unwrap_or_else(|| default_gn_base(n));
    let grids = gn_levels(n, base, common.refinements.unwrap_or(2))?;
    let lambdas = if common.lambda.is_empty() {
        vec![0.5, 1.0, 2.0]
    } else {
        common.lambda.clone()
    };
    if lambdas.iter().any(|&l| !l.is_finite() || l <= 0.0) {
        bail!("dilation factors must be positive");
    }
    let exec = Exec::default();
    let stability = gn_stability(&c, &tf, &grids, tolerance, exec)?;
    let dilation = dilation_sweep(&c, &tf, &lambdas, &grids[0], exec)?;
    let first = &stability.reports[0];
    let mut warnings = first.warnings.clone();
    warnings.dedup();
    let result = GnResult {
        n,
        degree: h,
        case: first.case,
        q: first.q,
        exponent_label: first.exponent_label.clone(),
        warnings: warnings.clone(),
        dilation_passed: dilation.iter().all(|d| d.passed),
        stability,
        dilation,
    };
    let mut cfg = config("gn", common, vec![n], Some(h));
    cfg.grid_nodes = Some(grids.iter().map(|g| g.nodes_xy).collect());
    cfg.lambda = Some(lambdas);
    cfg.form = Some(form);
    let mut a = Artifact::new(format!("gn_n{n}_h{h}"), &cfg, &result)?;
    a.warnings = warnings;
    let mut csv =
        String::from("row,nodes_xy,nodes_t,half_width,lambda,lhs,rhs,ratio,relative_difference\n");
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    for r in &result.stability.reports {
        writeln!(
            csv,
            "level,{},{},{},1,{:e},{:e},{},",
            r.grid.nodes_xy,
            r.grid.nodes_t,
            GN_HALF_WIDTH,
            r.lhs,
            r.rhs,
            opt(r.ratio)
        )?;
    }
    for d in &result.dilation {
        writeln!(
            csv,
            "dilation,{},{},{},{},,,{},{}",
            grids[0].nodes_xy,
            grids[0].nodes_t,
            GN_HALF_WIDTH / d.lambda,
            d.lambda,
            opt(d.dilated_ratio),
            opt(d.relative_difference)
        )?;
    }
    a.csv = Some(csv);
    Ok(a)
}
