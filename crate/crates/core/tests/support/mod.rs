//! Test-only helpers shared by the integration suites.
#![allow(dead_code)]

use std::path::PathBuf;

use parasynth::corpus_io::LanguageTag;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn ko() -> LanguageTag {
    LanguageTag::new("Korean", "ko").unwrap()
}

pub fn de() -> LanguageTag {
    LanguageTag::new("German", "de").unwrap()
}

/// Brute-force BLEU over pre-split tokens, written without hash maps or
/// sliding-window helpers: every n-gram is compared element by element.
pub mod bleu_oracle {
    fn same(a: &[&str], b: &[&str]) -> bool {
        a.len() == b.len() && (0..a.len()).all(|i| a[i] == b[i])
    }

    fn grams<'a>(tokens: &[&'a str], n: usize) -> Vec<Vec<&'a str>> {
        let mut out = Vec::new();
        if tokens.len() < n {
            return out;
        }
        for start in 0..=tokens.len() - n {
            let mut g = Vec::new();
            for k in 0..n {
                g.push(tokens[start + k]);
            }
            out.push(g);
        }
        out
    }

    /// (clipped matches, hypothesis n-gram count) for order `n`.
    pub fn counts(hyp: &[&str], reference: &[&str], n: usize) -> (usize, usize) {
        let h = grams(hyp, n);
        let r = grams(reference, n);
        let mut matched = 0;
        for i in 0..h.len() {
            // count each distinct n-gram once, at its first occurrence
            if (0..i).any(|j| same(&h[j], &h[i])) {
                continue;
            }
            let in_hyp = h.iter().filter(|g| same(g, &h[i])).count();
            let in_ref = r.iter().filter(|g| same(g, &h[i])).count();
            matched += in_hyp.min(in_ref);
        }
        (matched, h.len())
    }

    fn combine(p: [f64; 4], c: usize, r: usize) -> f64 {
        let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
        100.0 * bp * (p[0] * p[1] * p[2] * p[3]).powf(0.25)
    }

    pub fn sentence(hyp: &[&str], reference: &[&str]) -> f64 {
        if hyp.is_empty() || reference.is_empty() {
            return 0.0;
        }
        let mut p = [0.0; 4];
        for n in 1..=4 {
            let (m, t) = counts(hyp, reference, n);
            if n == 1 && m == 0 {
                return 0.0;
            }
            p[n - 1] = if m == 0 { 1.0 / (t as f64 + 1.0) } else { m as f64 / t as f64 };
        }
        combine(p, hyp.len(), reference.len())
    }

    pub fn corpus(pairs: &[(Vec<&str>, Vec<&str>)]) -> f64 {
        let c: usize = pairs.iter().map(|(h, _)| h.len()).sum();
        let r: usize = pairs.iter().map(|(_, x)| x.len()).sum();
        if c == 0 || r == 0 {
            return 0.0;
        }
        let mut p = [0.0; 4];
        for n in 1..=4 {
            let (mut m, mut t) = (0, 0);
            for (h, x) in pairs {
                let (mm, tt) = counts(h, x, n);
                m += mm;
                t += tt;
            }
            if t == 0 {
                p[n - 1] = 1.0;
            } else if m == 0 {
                return 0.0;
            } else {
                p[n - 1] = m as f64 / t as f64;
            }
        }
        combine(p, c, r)
    }
}
