//! Signal, atom and image files plus JSON report emission.
//!
//! Signal CSV rows are `x,u` at uniformly spaced cell centers; an optional
//! header row is skipped. Atoms CSV rows are `x,jump`. Images are PGM P2 or P5
//! with intensities mapped to `[0, 1]`.

use crate::bv::{forward_differences, Atom, BVFunction};
use crate::domain::Domain;
use crate::error::{Error, Result};
use serde::Serialize;
use std::fs;
use std::path::Path;

/// Relative spacing tolerance when inferring a grid from sample positions.
const SPACING_TOL: f64 = 1e-6;

/// Uniform 1D samples, positioned at cell centers of `domain`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    pub domain: Domain,
    pub values: Vec<f64>,
}

/// Grayscale image on a rectangle of unit width and square pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major, top row first, in `[0, 1]`.
    pub values: Vec<f64>,
}

impl Image {
    pub fn domain(&self) -> Result<Domain> {
        let h = 1.0 / self.width as f64;
        Domain::rect((0.0, 1.0), (0.0, h * self.height as f64), self.width, self.height)
    }
}

fn parse_err(path: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), line, msg: msg.into() }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

/// Two-column numeric rows. The first row may be a header.
fn read_pairs(text: &str, path: &str) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(k + 1, |p| p.line() as usize);
        if rec.len() != 2 {
            return Err(parse_err(path, line, format!("expected 2 columns, found {}", rec.len())));
        }
        let parsed: Vec<std::result::Result<f64, _>> = rec.iter().map(str::parse::<f64>).collect();
        match (&parsed[0], &parsed[1]) {
            (Ok(a), Ok(b)) => {
                if !a.is_finite() || !b.is_finite() {
                    return Err(parse_err(path, line, "non-finite value"));
                }
                out.push((*a, *b));
            }
            _ if out.is_empty() && k == 0 => continue,
            _ => {
                let bad = rec.iter().zip(&parsed).find(|(_, p)| p.is_err()).map(|(s, _)| s).unwrap_or("");
                return Err(parse_err(path, line, format!("not a number: {bad:?}")));
            }
        }
    }
    Ok(out)
}

pub fn parse_signal(text: &str, path: &str) -> Result<Signal> {
    let rows = read_pairs(text, path)?;
    if rows.len() < 2 {
        return Err(parse_err(path, rows.len(), "a signal needs at least 2 samples"));
    }
    let n = rows.len();
    let (x0, x1) = (rows[0].0, rows[n - 1].0);
    let h = (x1 - x0) / (n - 1) as f64;
    if !(h > 0.0) {
        return Err(parse_err(path, 1, "sample positions must increase"));
    }
    for (k, &(x, _)) in rows.iter().enumerate() {
        let want = x0 + k as f64 * h;
        if (x - want).abs() > SPACING_TOL * h {
            return Err(parse_err(path, k + 1, format!("sample positions are not uniformly spaced at x = {x}")));
        }
    }
    let domain = Domain::interval(x0 - 0.5 * h, x1 + 0.5 * h, n)?;
    Ok(Signal { domain, values: rows.into_iter().map(|r| r.1).collect() })
}

pub fn load_signal(path: &Path) -> Result<Signal> {
    parse_signal(&fs::read_to_string(path)?, &display(path))
}

/// Writes `x,u` rows with round-trip precision.
pub fn signal_csv(domain: &Domain, values: &[f64]) -> Result<String> {
    let iv = domain.as_interval()?;
    if values.len() != iv.n {
        return Err(Error::Shape { expected: iv.n, got: values.len() });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "u"]).map_err(csv_io)?;
    for (x, u) in iv.centers().iter().zip(values) {
        w.write_record([x.to_string(), u.to_string()]).map_err(csv_io)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Input(e.to_string()))?).expect("utf8"))
}

fn csv_io(e: csv::Error) -> Error {
    Error::Input(e.to_string())
}

pub fn save_signal(path: &Path, domain: &Domain, values: &[f64]) -> Result<()> {
    fs::write(path, signal_csv(domain, values)?)?;
    Ok(())
}

pub fn parse_atoms(text: &str, path: &str) -> Result<Vec<Atom>> {
    Ok(read_pairs(text, path)?.into_iter().map(|(x, jump)| Atom { x, jump }).collect())
}

pub fn load_atoms(path: &Path) -> Result<Vec<Atom>> {
    parse_atoms(&fs::read_to_string(path)?, &display(path))
}

pub fn atoms_csv(atoms: &[Atom]) -> String {
    let mut s = String::from("x,jump\n");
    for a in atoms {
        s.push_str(&format!("{},{}\n", a.x, a.jump));
    }
    s
}

/// BV function from full samples and an explicit jump list. Each jump is
/// removed from the difference across its node before forming the density.
pub fn signal_to_bv(signal: &Signal, atoms: Vec<Atom>) -> Result<BVFunction> {
    let iv = *signal.domain.as_interval()?;
    let h = iv.h();
    let mut g = forward_differences(&signal.values, h);
    for a in &atoms {
        let k = iv
            .node_index(a.x)
            .ok_or_else(|| Error::Input(format!("atom at {} is not on a node between samples", a.x)))?;
        if k == 0 || k == iv.n {
            return Err(Error::Input(format!("atom at {} is not inside the domain", a.x)));
        }
        g[k - 1] -= a.jump / h;
    }
    BVFunction::from_parts(signal.domain, signal.values.clone(), g, atoms)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a str,
}

impl Cursor<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { path: self.path.to_string(), line: self.line(), msg: format!("byte {}: {}", self.pos, msg.into()) }
    }

    fn line(&self) -> usize {
        1 + self.bytes[..self.pos.min(self.bytes.len())].iter().filter(|b| **b == b'\n').count()
    }

    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Result<&[u8]> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() && self.bytes[self.pos] != b'#' {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("unexpected end of file"));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn uint(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| self.err(format!("expected {what}")))
    }
}

pub fn parse_pgm(bytes: &[u8], path: &str) -> Result<Image> {
    let mut c = Cursor { bytes, pos: 0, path };
    let magic = c.token()?.to_vec();
    let binary = match magic.as_slice() {
        b"P2" => false,
        b"P5" => true,
        _ => return Err(c.err("expected magic P2 or P5")),
    };
    let width = c.uint("width")?;
    let height = c.uint("height")?;
    let maxval = c.uint("maxval")?;
    if width == 0 || height == 0 {
        return Err(c.err("image must be nonempty"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(c.err("maxval must be in 1..=65535"));
    }
    let count = width * height;
    let mut raw = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte after maxval
        c.pos += 1;
        let wide = maxval > 255;
        let need = count * if wide { 2 } else { 1 };
        if c.pos + need > bytes.len() {
            c.pos = bytes.len();
            return Err(c.err(format!("raster truncated: need {need} bytes")));
        }
        let data = &bytes[c.pos..c.pos + need];
        for k in 0..count {
            let v = if wide { u16::from_be_bytes([data[2 * k], data[2 * k + 1]]) as usize } else { data[k] as usize };
            raw.push(v);
        }
    } else {
        for _ in 0..count {
            raw.push(c.uint("pixel value")?);
        }
    }
    if let Some(k) = raw.iter().position(|v| *v > maxval) {
        return Err(c.err(format!("pixel {k} exceeds maxval {maxval}")));
    }
    let m = maxval as f64;
    Ok(Image { width, height, maxval: maxval as u16, values: raw.into_iter().map(|v| v as f64 / m).collect() })
}

pub fn load_pgm(path: &Path) -> Result<Image> {
    parse_pgm(&fs::read(path)?, &display(path))
}

/// Encodes the image, clamping intensities to `[0, 1]`.
pub fn pgm_bytes(img: &Image, binary: bool) -> Result<Vec<u8>> {
    if img.values.len() != img.width * img.height {
        return Err(Error::Shape { expected: img.width * img.height, got: img.values.len() });
    }
    let m = img.maxval.max(1);
    let q: Vec<u16> = img.values.iter().map(|v| (v.clamp(0.0, 1.0) * m as f64).round() as u16).collect();
    let mut out = format!("{}\n{} {}\n{}\n", if binary { "P5" } else { "P2" }, img.width, img.height, m).into_bytes();
    if binary {
        for v in q {
            if m > 255 {
                out.extend_from_slice(&v.to_be_bytes());
            } else {
                out.push(v as u8);
            }
        }
    } else {
        for row in q.chunks(img.width) {
            let line: Vec<String> = row.iter().map(u16::to_string).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    Ok(out)
}

pub fn save_pgm(path: &Path, img: &Image, binary: bool) -> Result<()> {
    fs::write(path, pgm_bytes(img, binary)?)?;
    Ok(())
}

pub fn report_json<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit_report<T: Serialize>(report: &T, path: Option<&Path>) -> Result<()> {
    let s = report_json(report)?;
    match path {
        Some(p) => fs::write(p, s)?,
        None => print!("{s}"),
    }
    Ok(())
}

/// Required top-level keys of each report kind.
pub fn report_keys(command: &str) -> &'static [&'static str] {
    match command {
        "modular" => &["config", "ac_part", "singular_part", "fidelity", "total", "atoms"],
        "gamma-sweep" => &["config", "schedule", "energies", "gap", "limit_modular", "jump_atoms", "flags"],
        "dualsup" | "dualnorm" => &["config", "value", "optimizer", "capped"],
        "denoise" => &["config", "energy", "iterations", "capped"],
        "conjugate" => &["config", "x", "points", "recession"],
        "check-conditions" => &["config", "reports"],
        "approx" => &["config", "steps", "exact"],
        _ => &["config"],
    }
}

/// Checks a parsed report against [`report_keys`].
pub fn validate_report(command: &str, report: &serde_json::Value) -> Result<()> {
    let obj = report.as_object().ok_or_else(|| Error::Input("report is not a JSON object".into()))?;
    for key in report_keys(command) {
        if !obj.contains_key(*key) {
            return Err(Error::Input(format!("{command} report lacks \"{key}\"")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_samples() {
        let s = parse_signal("0,0\n0.5,1\n1,0", "u.csv").unwrap();
        assert_eq!(s.values, vec![0.0, 1.0, 0.0]);
        let iv = s.domain.as_interval().unwrap();
        assert_eq!((iv.lo, iv.hi, iv.n), (-0.25, 1.25, 3));
        assert!(parse_signal("x,u\n0,0\n1,2\n", "u.csv").is_ok());
    }

    #[test]
    fn signal_diagnostics() {
        let e = parse_signal("0,0\n0.5,oops\n1,0\n", "u.csv").unwrap_err().to_string();
        assert!(e.starts_with("u.csv:2:"), "{e}");
        let e = parse_signal("0,0\n0.1,1\n1,0\n", "u.csv").unwrap_err().to_string();
        assert!(e.contains(":2:"), "{e}");
        let e = parse_signal("0,0\n0.5,1,2\n", "u.csv").unwrap_err().to_string();
        assert!(e.contains("u.csv:2"), "{e}");
    }

    #[test]
    fn signal_round_trip() {
        let d = Domain::interval(-1.0, 1.0, 7).unwrap();
        let v: Vec<f64> = (0..7).map(|k| (k as f64 * 0.713).sin() / 3.0).collect();
        let s = parse_signal(&signal_csv(&d, &v).unwrap(), "mem").unwrap();
        assert_eq!(s.values, v);
        let iv = s.domain.as_interval().unwrap();
        assert!((iv.lo + 1.0).abs() < 1e-12 && (iv.hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn atoms_map_onto_nodes() {
        let s = parse_signal("0,0\n1,0\n2,3\n3,3.5\n", "u.csv").unwrap();
        let atoms = parse_atoms(&atoms_csv(&[Atom { x: 1.5, jump: 3.0 }]), "a.csv").unwrap();
        let u = signal_to_bv(&s, atoms).unwrap();
        assert_eq!(u.gradient(), &[0.0, 0.0, 0.5, 0.0]);
        assert!(signal_to_bv(&s, vec![Atom { x: 1.2, jump: 1.0 }]).is_err());
    }

    #[test]
    fn pgm_ascii() {
        let img = parse_pgm(b"P2\n# tiny\n2 2\n255\n0 255\n51 102\n", "a.pgm").unwrap();
        assert_eq!(img.values, vec![0.0, 1.0, 0.2, 0.4]);
        let back = parse_pgm(&pgm_bytes(&img, false).unwrap(), "b.pgm").unwrap();
        assert!(back.values.iter().zip(&img.values).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn pgm_binary_is_byte_exact() {
        let mut bytes = b"P5\n3 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 7, 128, 200, 254, 255]);
        let img = parse_pgm(&bytes, "a.pgm").unwrap();
        assert_eq!(pgm_bytes(&img, true).unwrap(), bytes);
        let mut wide = b"P5\n1 2\n1000\n".to_vec();
        wide.extend_from_slice(&[0x03, 0xe8, 0x00, 0x01]);
        let img = parse_pgm(&wide, "w.pgm").unwrap();
        assert_eq!(img.values, vec![1.0, 0.001]);
        assert_eq!(pgm_bytes(&img, true).unwrap(), wide);
    }

    #[test]
    fn pgm_diagnostics() {
        let e = parse_pgm(b"P5\n4 4\n255\n\x01\x02", "t.pgm").unwrap_err().to_string();
        assert!(e.contains("byte") && e.contains("truncated"), "{e}");
        let e = parse_pgm(b"P2\n2 1\n10\n3\n11\n", "t.pgm").unwrap_err().to_string();
        assert!(e.contains("exceeds"), "{e}");
        assert!(parse_pgm(b"P3\n", "t.pgm").is_err());
    }

    #[test]
    fn image_domain_has_square_pixels() {
        let img = Image { width: 4, height: 2, maxval: 255, values: vec![0.0; 8] };
        let Domain::Rect(r) = img.domain().unwrap() else { panic!() };
        assert!((r.x.h() - r.y.h()).abs() < 1e-15);
    }

    #[test]
    fn report_validation() {
        let v: serde_json::Value = serde_json::from_str(r#"{"config":{},"value":1,"optimizer":{},"capped":false}"#).unwrap();
        assert!(validate_report("dualsup", &v).is_ok());
        assert!(validate_report("modular", &v).is_err());
    }
}
