//! job configuration: one sectioned text file holding the algebra together
//! with optional named modules and complexes.

use homlab::algebra::{load_algebra, parse_document, Algebra, Document};
use homlab::homalg::{free_module, injective, regular, simple, Complex, Module};
use homlab::linalg::{FieldSpec, Matrix, Scalar};
use std::path::Path;

pub struct Job {
    pub algebra: Algebra,
    pub doc: Document,
    pub name: String,
}

pub fn load(path: &str) -> Result<Job, String> {
    let src = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let algebra = load_algebra(&src).map_err(|e| format!("{path}: {e}"))?;
    let doc = parse_document(&src).map_err(|e| format!("{path}: {e}"))?;
    let name = doc.keyed("meta", "name").unwrap_or_else(|| {
        Path::new(path)
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "algebra".to_string())
    });
    Ok(Job { algebra, doc, name })
}

pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("bad range {s}; expected lo..hi"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad range bound {lo}"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad range bound {hi}"))?;
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

fn parse_scalar(field: FieldSpec, s: &str) -> Result<Scalar, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| format!("bad scalar {s}"))?;
        let d: i64 = d.trim().parse().map_err(|_| format!("bad scalar {s}"))?;
        Ok(field.mul(&field.from_int(n), &field.inv(&field.from_int(d))))
    } else {
        let n: i64 = s.parse().map_err(|_| format!("bad scalar {s}"))?;
        Ok(field.from_int(n))
    }
}

/// rows separated by ';', entries by ','; e.g. "1,0;0,1".
fn parse_matrix(field: FieldSpec, spec: &str, rows: usize, cols: usize) -> Result<Matrix, String> {
    let mut m = Matrix::zero(rows, cols, field);
    let row_specs: Vec<&str> = if spec.trim().is_empty() {
        Vec::new()
    } else {
        spec.split(';').collect()
    };
    if row_specs.len() != rows {
        return Err(format!("matrix has {} rows, expected {rows}", row_specs.len()));
    }
    for (i, r) in row_specs.iter().enumerate() {
        let entries: Vec<&str> = r.split(',').collect();
        if entries.len() != cols {
            return Err(format!("row {i} has {} entries, expected {cols}", entries.len()));
        }
        for (j, e) in entries.iter().enumerate() {
            m.set(i, j, parse_scalar(field, e)?);
        }
    }
    Ok(m)
}

fn module_from_section(job: &Job, lines: &[String], label: &str) -> Result<Module, String> {
    let alg = &job.algebra;
    let mut dim: Option<usize> = None;
    let mut actions: Vec<Option<Matrix>> = vec![None; alg.dim];
    for line in lines {
        if let Some(v) = line.strip_prefix("dim") {
            let v = v.trim_start_matches(['=', ' ']).trim();
            dim = Some(v.parse().map_err(|_| format!("{label}: bad dim {v}"))?);
        } else if let Some(v) = line.strip_prefix("action") {
            let (who, spec) = v
                .split_once('=')
                .ok_or_else(|| format!("{label}: bad action line {line}"))?;
            let who = who.trim();
            let idx = alg
                .labels
                .iter()
                .position(|l| l == who)
                .ok_or_else(|| format!("{label}: unknown basis element {who}"))?;
            let d = dim.ok_or_else(|| format!("{label}: dim must come before actions"))?;
            actions[idx] = Some(parse_matrix(alg.field, spec, d, d)?);
        } else {
            return Err(format!("{label}: unrecognized line {line}"));
        }
    }
    let d = dim.ok_or_else(|| format!("{label}: missing dim"))?;
    let action: Vec<Matrix> = actions
        .into_iter()
        .map(|a| a.unwrap_or_else(|| Matrix::zero(d, d, alg.field)))
        .collect();
    let m = Module { dim: d, action };
    m.validate(alg).map_err(|e| format!("{label}: {e}"))?;
    Ok(m)
}

/// resolve a module by name: built-ins k, S<i>, P<i>, I<i>, Lambda, or a
/// [module <name>] section of the config.
pub fn resolve_module(job: &Job, name: &str) -> Result<Module, String> {
    let alg = &job.algebra;
    let ns = alg.num_idempotents();
    let indexed = |prefix: &str| -> Option<usize> {
        name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok())
    };
    if name == "k" {
        return Ok(simple(alg, 0));
    }
    if name == "Lambda" || name == "reg" || name == "regular" {
        return Ok(regular(alg));
    }
    if let Some(i) = indexed("S") {
        if i >= ns {
            return Err(format!("simple index {i} out of range (have {ns})"));
        }
        return Ok(simple(alg, i));
    }
    if let Some(i) = indexed("P") {
        if i >= ns {
            return Err(format!("projective index {i} out of range (have {ns})"));
        }
        return Ok(free_module(alg, &[i]).module);
    }
    if let Some(i) = indexed("I") {
        if i >= ns {
            return Err(format!("injective index {i} out of range (have {ns})"));
        }
        return Ok(injective(alg, i));
    }
    for (sec, lines) in &job.doc.sections {
        if let Some(rest) = sec.strip_prefix("module ") {
            if rest.trim() == name {
                return module_from_section(job, lines, name);
            }
        }
    }
    Err(format!("unknown module {name}"))
}

/// resolve a complex by name: a [complex <name>] section, or the degree-0
/// stalk of a module with that name.
pub fn resolve_complex(job: &Job, name: &str) -> Result<Complex, String> {
    let alg = &job.algebra;
    for (sec, lines) in &job.doc.sections {
        if let Some(rest) = sec.strip_prefix("complex ") {
            if rest.trim() != name {
                continue;
            }
            let mut c = Complex::empty(alg.field);
            let mut diff_specs: Vec<(i64, String)> = Vec::new();
            for line in lines {
                if let Some(v) = line.strip_prefix("component") {
                    let (deg, mname) = v
                        .split_once('=')
                        .ok_or_else(|| format!("{name}: bad component line {line}"))?;
                    let deg: i64 = deg
                        .trim()
                        .parse()
                        .map_err(|_| format!("{name}: bad degree {deg}"))?;
                    let m = resolve_module(job, mname.trim())?;
                    if !m.is_zero() {
                        c.components.insert(deg, m);
                    }
                } else if let Some(v) = line.strip_prefix("diff") {
                    let (deg, spec) = v
                        .split_once('=')
                        .ok_or_else(|| format!("{name}: bad diff line {line}"))?;
                    let deg: i64 = deg
                        .trim()
                        .parse()
                        .map_err(|_| format!("{name}: bad degree {deg}"))?;
                    diff_specs.push((deg, spec.to_string()));
                } else {
                    return Err(format!("{name}: unrecognized line {line}"));
                }
            }
            for (deg, spec) in diff_specs {
                let d = parse_matrix(alg.field, &spec, c.dim_at(deg + 1), c.dim_at(deg))?;
                c.diff.insert(deg, d);
            }
            c.validate(alg).map_err(|e| format!("{name}: {e}"))?;
            return Ok(c);
        }
    }
    let m = resolve_module(job, name)?;
    Ok(Complex::stalk(alg.field, m, 0))
}
