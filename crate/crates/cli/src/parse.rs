//! Fixture, divisor and polarization-vector text formats.

use heegner_core::cusp::{derive_heisenberg_params, CuspData, HeisenbergParams};
use heegner_core::error::{Error, Result};
use heegner_core::hlattice::{parse_vector, HermitianLattice, LatticeVector};
use heegner_core::local_products::HeegnerCombo;
use heegner_core::qfield::{int, parse_rat, FieldSpec, Rat};
use heegner_core::weil_theta::PolynomialP;

/// A parsed fixture file.
pub struct FixtureFile {
    pub name: String,
    pub cusp: CuspData,
    pub params: HeisenbergParams,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn key_value(line: &str, n: usize) -> Result<(&str, &str)> {
    let (k, v) = line
        .split_once('=')
        .ok_or_else(|| err(n, format!("expected `key = value`, found `{line}`")))?;
    Ok((k.trim(), v.trim()))
}

/// Parses
///
/// ```text
/// disc = -4
/// rank = 3
/// row = 0; -1/2*zeta; 0
/// row = 1/2*zeta; 0; 0
/// row = 0; 0; -1
/// ell = (1; 0; 0)
/// ell_prime = (0; 1; 0)
/// heisenberg_n = 1            # optional, together with heisenberg_basis
/// heisenberg_basis = (2); (2*zeta)
/// ```
pub fn parse_fixture(name: &str, text: &str) -> Result<FixtureFile> {
    let mut field: Option<FieldSpec> = None;
    let mut rank: Option<usize> = None;
    let mut rows: Vec<(usize, Vec<heegner_core::qfield::FieldElem>)> = Vec::new();
    let mut ell: Option<(usize, LatticeVector)> = None;
    let mut ell_prime: Option<(usize, LatticeVector)> = None;
    let mut hn: Option<(usize, Rat)> = None;
    let mut hbasis: Option<(usize, Vec<LatticeVector>)> = None;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (key, value) = key_value(line, n)?;
        let need_field = || field.ok_or_else(|| err(n, "`disc` must come first"));
        match key {
            "disc" => {
                let d: i64 = value.parse().map_err(|_| err(n, format!("bad discriminant `{value}`")))?;
                field = Some(FieldSpec::new(d).map_err(|e| err(n, e.to_string()))?);
            }
            "rank" => rank = Some(value.parse().map_err(|_| err(n, format!("bad rank `{value}`")))?),
            "row" => {
                let k = need_field()?;
                let row = value
                    .split(';')
                    .map(|t| k.parse_elem(t).ok_or_else(|| err(n, format!("bad field element `{}`", t.trim()))))
                    .collect::<Result<Vec<_>>>()?;
                rows.push((n, row));
            }
            "ell" | "ell_prime" => {
                let k = need_field()?;
                let v = parse_vector(k, value).ok_or_else(|| err(n, format!("bad vector `{value}`")))?;
                if key == "ell" {
                    ell = Some((n, v));
                } else {
                    ell_prime = Some((n, v));
                }
            }
            "heisenberg_n" => {
                hn = Some((n, parse_rat(value).ok_or_else(|| err(n, format!("bad rational `{value}`")))?));
            }
            "heisenberg_basis" => {
                let k = need_field()?;
                let basis = split_vectors(value)
                    .into_iter()
                    .map(|s| parse_vector(k, s).ok_or_else(|| err(n, format!("bad vector `{s}`"))))
                    .collect::<Result<Vec<_>>>()?;
                hbasis = Some((n, basis));
            }
            other => return Err(err(n, format!("unknown key `{other}`"))),
        }
    }
    let last = text.lines().count().max(1);
    let field = field.ok_or_else(|| err(last, "missing `disc`"))?;
    let rank = rank.ok_or_else(|| err(last, "missing `rank`"))?;
    if rows.len() != rank {
        return Err(err(last, format!("expected {rank} gram rows, found {}", rows.len())));
    }
    for (n, row) in &rows {
        if row.len() != rank {
            return Err(err(*n, format!("gram row has {} entries, expected {rank}", row.len())));
        }
    }
    let gram: Vec<_> = rows.iter().map(|(_, r)| r.clone()).collect();
    let lattice = HermitianLattice::new(field, gram).map_err(|e| match e {
        Error::NotHermitian { row, col, found, expected } => err(
            rows[row].0,
            format!("gram entry ({row},{col}) is {found} but must be the conjugate of entry ({col},{row}), {expected}"),
        ),
        other => err(rows[0].0, other.to_string()),
    })?;
    let (ln, ell) = ell.ok_or_else(|| err(last, "missing `ell`"))?;
    let (_, ell_prime) = ell_prime.ok_or_else(|| err(last, "missing `ell_prime`"))?;
    let cusp = CuspData::new(lattice, ell, ell_prime).map_err(|e| err(ln, e.to_string()))?;
    let params = match (hn, hbasis) {
        (None, None) => derive_heisenberg_params(&cusp)?,
        (Some((n, nv)), Some((_, basis))) => {
            HeisenbergParams::from_override(&cusp, nv, basis).map_err(|e| err(n, e.to_string()))?
        }
        (Some((n, _)), None) | (None, Some((n, _))) => {
            return Err(err(n, "heisenberg_n and heisenberg_basis must be given together"))
        }
    };
    Ok(FixtureFile {
        name: name.to_string(),
        cusp,
        params,
    })
}

fn split_vectors(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => {
                if depth == 0 {
                    start = Some(i);
                }
                depth += 1;
            }
            ')' => {
                depth -= 1;
                if depth == 0 {
                    if let Some(st) = start.take() {
                        out.push(&s[st..=i]);
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Inverse of `parse_fixture` for the lattice and cusp sections.
#[cfg(test)]
pub fn fixture_to_text(lattice: &HermitianLattice, ell: &LatticeVector, ell_prime: &LatticeVector) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    writeln!(s, "disc = {}", lattice.field().disc()).unwrap();
    writeln!(s, "rank = {}", lattice.rank()).unwrap();
    for row in lattice.gram() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        writeln!(s, "row = {}", cells.join("; ")).unwrap();
    }
    writeln!(s, "ell = {ell}").unwrap();
    writeln!(s, "ell_prime = {ell_prime}").unwrap();
    s
}

/// Parses lines `beta m c`, where `beta` is a coset index of `L'/L` or a
/// vector `(x1; ...; xr)` of `L'` in lattice coordinates.
pub fn parse_divisor(cusp: &CuspData, text: &str) -> Result<HeegnerCombo> {
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (beta_str, rest) = if line.starts_with('(') {
            let close = line.find(')').ok_or_else(|| err(n, "unclosed vector"))?;
            (&line[..=close], line[close + 1..].trim())
        } else {
            line.split_once(char::is_whitespace)
                .map(|(a, b)| (a, b.trim()))
                .ok_or_else(|| err(n, "expected `beta m c`"))?
        };
        let beta = if beta_str.starts_with('(') {
            let v = parse_vector(cusp.field(), beta_str).ok_or_else(|| err(n, format!("bad vector `{beta_str}`")))?;
            cusp.disc_group().index_of(&v).map_err(|e| err(n, e.to_string()))?
        } else {
            beta_str.parse().map_err(|_| err(n, format!("bad coset index `{beta_str}`")))?
        };
        let parts: Vec<&str> = rest.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(err(n, "expected `beta m c`"));
        }
        let m = parse_rat(parts[0]).ok_or_else(|| err(n, format!("bad norm `{}`", parts[0])))?;
        let c: i64 = parts[1].parse().map_err(|_| err(n, format!("bad coefficient `{}`", parts[1])))?;
        terms.push((n, beta, m, c));
    }
    for (n, beta, m, _) in &terms {
        HeegnerCombo::new(cusp, [(*beta, m.clone(), 0)]).map_err(|e| err(*n, e.to_string()))?;
    }
    HeegnerCombo::new(cusp, terms.into_iter().map(|(_, b, m, c)| (b, m, c)))
}

/// Parses `0` or a sum of terms `[c*]f<j>` and `[c*]i*f<j>` with rational `c`.
pub fn parse_v_spec(cusp: &CuspData, spec: &str) -> Result<PolynomialP> {
    let k = cusp.field();
    let n = cusp.n();
    let bad = |msg: String| Error::InvalidArgument(format!("v-spec `{spec}`: {msg}"));
    let mut re = LatticeVector::zero(k, n);
    let mut im = LatticeVector::zero(k, n);
    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "0" {
        return PolynomialP::new(re, im, "0");
    }
    if compact.is_empty() {
        return Err(bad("empty".into()));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, c) in compact.char_indices() {
        if i > 0 && (c == '+' || c == '-') && !compact[..i].ends_with('*') && !compact[..i].ends_with('/') {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(r) => (int(-1), r),
            None => (int(1), term.strip_prefix('+').unwrap_or(term)),
        };
        let fpos = body.rfind('f').ok_or_else(|| bad(format!("term `{term}` names no basis vector")))?;
        let j: usize = body[fpos + 1..]
            .parse()
            .map_err(|_| bad(format!("bad index in `{term}`")))?;
        if j == 0 || j > n {
            return Err(bad(format!("index {j} out of range 1..={n}")));
        }
        let mut head = body[..fpos].strip_suffix('*').unwrap_or(&body[..fpos]);
        let imaginary = head == "i" || head.ends_with("*i");
        if imaginary {
            head = head.strip_suffix('i').unwrap_or(head);
            head = head.strip_suffix('*').unwrap_or(head);
        }
        let coef = if head.is_empty() {
            int(1)
        } else {
            parse_rat(head).ok_or_else(|| bad(format!("bad coefficient `{head}`")))?
        };
        let unit = LatticeVector::unit(k, n, j - 1).scale_rat(&(coef * &sign));
        if imaginary {
            im = im.add(&unit);
        } else {
            re = re.add(&unit);
        }
    }
    PolynomialP::new(re, im, compact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use heegner_core::fixtures;

    #[test]
    fn builtin_fixtures_round_trip() {
        for f in fixtures::all() {
            let text = fixture_to_text(&f.lattice, &f.ell, &f.ell_prime);
            let parsed = parse_fixture(&f.name, &text).unwrap();
            assert_eq!(parsed.cusp.lattice(), &f.lattice);
        }
    }

    #[test]
    fn non_hermitian_gram_names_entry() {
        let text = "disc = -4\nrank = 3\nrow = 0; -1/2*zeta; 0\nrow = 1/2*zeta; 0; 1\nrow = 0; 0; -1\nell = (1;0;0)\nell_prime = (0;1;0)\n";
        let e = parse_fixture("bad", text).err().unwrap();
        let msg = e.to_string();
        assert!(msg.contains("(2,1)") || msg.contains("(1,2)"), "{msg}");
        assert!(msg.starts_with("line "), "{msg}");
    }

    #[test]
    fn v_specs() {
        let cusp = fixtures::gaussian_n2().cusp().unwrap();
        let v = parse_v_spec(&cusp, "f1 - 2*i*f2").unwrap();
        assert_eq!(v.re, LatticeVector::unit(cusp.field(), 2, 0));
        assert_eq!(v.im, LatticeVector::unit(cusp.field(), 2, 1).scale_rat(&int(-2)));
        assert!(parse_v_spec(&cusp, "0").unwrap().is_zero());
        assert!(parse_v_spec(&cusp, "f3").is_err());
        assert!(parse_v_spec(&cusp, "g1").is_err());
    }

    #[test]
    fn divisor_lines() {
        let cusp = fixtures::gaussian_n1().cusp().unwrap();
        let combo = parse_divisor(&cusp, "# torsion\n0 -1 2\n").unwrap();
        assert_eq!(combo.coeff(0, &int(-1)), 2);
        let e = parse_divisor(&cusp, "0 -1 2\n0 1 1\n").err().unwrap();
        assert!(e.to_string().starts_with("line 2"), "{e}");
    }
}

