//! Ready-made specs for a few standard graphs of groups.

use std::collections::BTreeMap;

use crate::oracle::VertexKind;
use crate::spec::{EdgeSpec, EndValue, SpecFile, VertexSpec};

fn vertex(name: &str, kind: VertexKind, generators: &[&str]) -> VertexSpec {
    VertexSpec { name: name.into(), kind, generators: generators.iter().map(|g| g.to_string()).collect() }
}

fn images(pairs: &[(&str, &str)]) -> BTreeMap<String, EndValue> {
    pairs.iter().map(|(k, v)| (k.to_string(), EndValue::Word(v.to_string()))).collect()
}

/// `BS(m, n) = <a, e | e a^m e^-1 = a^n>`: one vertex `Z = <a>`, loop `e`
/// with `alpha: c -> a^n`, `omega: c -> a^m`.
pub fn baumslag_solitar(m: i64, n: i64) -> SpecFile {
    SpecFile {
        vertices: vec![vertex("v", VertexKind::FreeAbelian, &["a"])],
        edges: vec![EdgeSpec {
            name: "e".into(),
            from: "v".into(),
            to: "v".into(),
            edge_generators: vec!["c".into()],
            alpha: images(&[("c", &format!("a^{n}"))]),
            omega: images(&[("c", &format!("a^{m}"))]),
        }],
        basepoint: None,
        translation: None,
    }
}

/// The trefoil group `<x> *_{x^2 = y^3} <y>` as `x^2 = e y^3 e^-1`.
pub fn trefoil() -> SpecFile {
    SpecFile {
        vertices: vec![vertex("u", VertexKind::Free, &["x"]), vertex("v", VertexKind::Free, &["y"])],
        edges: vec![EdgeSpec {
            name: "e".into(),
            from: "u".into(),
            to: "v".into(),
            edge_generators: vec!["c".into()],
            alpha: images(&[("c", "x^2")]),
            omega: images(&[("c", "y^3")]),
        }],
        basepoint: None,
        translation: None,
    }
}

/// `F(a) * F(b)` over a trivial edge group; `b` is read as `e b e^-1`.
pub fn free_product() -> SpecFile {
    SpecFile {
        vertices: vec![vertex("u", VertexKind::Free, &["a"]), vertex("v", VertexKind::Free, &["b"])],
        edges: vec![EdgeSpec {
            name: "e".into(),
            from: "u".into(),
            to: "v".into(),
            edge_generators: Vec::new(),
            alpha: BTreeMap::new(),
            omega: BTreeMap::new(),
        }],
        basepoint: None,
        translation: None,
    }
}

/// Rewrites a word over `a, b` for [`free_product`]: each maximal run of
/// `b`-letters is wrapped in `e ... e^-1`.
pub fn free_product_word(text: &str) -> String {
    let mut out: Vec<String> = Vec::new();
    let mut in_b = false;
    for token in text.split_whitespace() {
        let is_b = token.starts_with('b');
        if is_b && !in_b {
            out.push("e".into());
        }
        if !is_b && in_b {
            out.push("e^-1".into());
        }
        in_b = is_b;
        out.push(token.into());
    }
    if in_b {
        out.push("e^-1".into());
    }
    out.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_product_word_examples() {
        assert_eq!(free_product_word("a b"), "a e b e^-1");
        assert_eq!(free_product_word("b^-1 b a^2"), "e b^-1 b e^-1 a^2");
        assert_eq!(free_product_word(""), "");
    }
}
