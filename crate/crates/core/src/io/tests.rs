use super::*;
use crate::inverse::{Diagnostics, RecoverableCaps, RecoveredForm};
use crate::normal_form::{resonance_order, FrequencyVector, ResonantResidual};
use crate::spectral::{bnf_eigenvalues, Label, SpectrumSample};
use crate::symbol::{Basis, GradedPolynomial, Monomial, MultiIndex};
use crate::Error;
use num_complex::Complex64;

const CANONICAL: &str = include_str!("../../fixtures/quartic_canonical.json");
const QUARTIC: &str = include_str!("../../fixtures/quartic.json");

fn field_of(e: Error) -> String {
    match e {
        Error::Validation { field, .. } => field,
        other => panic!("expected a validation error, got {other}"),
    }
}

#[test]
fn canonical_fixture_round_trips_byte_identically() {
    let cf = canonical_from_json(CANONICAL).unwrap();
    assert_eq!(cf.coeff(&MultiIndex(vec![2]), 0), 0.015);
    assert_eq!(canonical_to_json(&cf), CANONICAL);
}

#[test]
fn malformed_index_names_its_path() {
    let bad = CANONICAL.replacen("\"r\": [\n        3\n      ]", "\"r\": [\n        3,\n        0\n      ]", 1);
    assert_ne!(bad, CANONICAL);
    assert_eq!(field_of(canonical_from_json(&bad).unwrap_err()), "coeffs[5].r");
}

#[test]
fn unknown_fields_are_rejected_with_path() {
    let bad = CANONICAL.replacen("\"i\": 2,", "\"i\": 2, \"extra\": 1,", 1);
    let e = canonical_from_json(&bad).unwrap_err();
    assert!(e.to_string().contains("extra"), "{e}");
    assert_eq!(field_of(e), "coeffs[0].extra");
    let bad = CANONICAL.replacen("\"bound\": 10", "\"bound\": 10, \"d\": 3", 1);
    assert_eq!(field_of(canonical_from_json(&bad).unwrap_err()), "resonance");
}

#[test]
fn canonical_semantic_checks() {
    let lin = CANONICAL.replacen("\"i\": 2,\n      \"c\": 0.00375", "\"i\": 0,\n      \"c\": 0.00375", 1);
    assert_eq!(field_of(canonical_from_json(&lin).unwrap_err()), "coeffs[0]");
    let neg = CANONICAL.replacen("1.0", "-1.0", 1);
    assert_eq!(field_of(canonical_from_json(&neg).unwrap_err()), "u[0]");
    let wrong_type = CANONICAL.replacen("\"L_max\": 3", "\"L_max\": \"three\"", 1);
    assert_eq!(field_of(canonical_from_json(&wrong_type).unwrap_err()), "L_max");
}

#[test]
fn hamiltonian_loader() {
    let h = hamiltonian_from_json(QUARTIC).unwrap();
    assert_eq!(h.coeff(&Monomial::new(vec![4], vec![0], 0)), Complex64::new(0.01, 0.0));
    let again = hamiltonian_from_json(&hamiltonian_to_json(&h)).unwrap();
    assert_eq!(again, h);
    assert_eq!(hamiltonian_to_json(&again), hamiltonian_to_json(&h));
    let too_high = QUARTIC.replace("\"degree_cap\": 8", "\"degree_cap\": 3");
    assert_eq!(field_of(hamiltonian_from_json(&too_high).unwrap_err()), "terms[2]");
    let short = QUARTIC.replacen("\"alpha\": [4]", "\"alpha\": [4, 0]", 1);
    assert_eq!(field_of(hamiltonian_from_json(&short).unwrap_err()), "terms[2].alpha");
    let dup = QUARTIC.replacen("\"alpha\": [4], \"beta\": [0]", "\"alpha\": [2], \"beta\": [0]", 1);
    assert_eq!(field_of(hamiltonian_from_json(&dup).unwrap_err()), "terms[2]");
    let neg = QUARTIC.replacen("\"hbar\": 0", "\"hbar\": -1", 1);
    assert_eq!(field_of(hamiltonian_from_json(&neg).unwrap_err()), "terms[0].hbar");
    assert!(hamiltonian_from_json("{").is_err());
}

#[test]
fn residual_round_trip_and_checks() {
    let freq = FrequencyVector::new(vec![1.0, 2.0]).unwrap();
    let spec = resonance_order(&freq).unwrap();
    let mut k = GradedPolynomial::zero(2, Basis::Complex, 6);
    k.add_term(Monomial::new(vec![2, 0], vec![0, 1], 0), Complex64::new(0.01, 0.02));
    k.add_term(Monomial::new(vec![0, 1], vec![2, 0], 0), Complex64::new(0.01, -0.02));
    let r = ResonantResidual::new(k, &spec).unwrap();
    let text = residual_to_json(&r);
    let back = residual_from_json(&text, &spec).unwrap();
    assert_eq!(back, r);
    assert_eq!(residual_to_json(&back), text);
    let other = resonance_order(&FrequencyVector::new(vec![1.0, 3.0]).unwrap()).unwrap();
    assert_eq!(field_of(residual_from_json(&text, &other).unwrap_err()), "d");
}

#[test]
fn recovered_form_round_trip() {
    let cf = canonical_from_json(CANONICAL).unwrap();
    let mut dg = Diagnostics::default();
    dg.residuals.insert("p0".into(), 1.5e-13);
    dg.cond.insert("hbar_fit".into(), 123.25);
    dg.rank.insert("stage[1]".into(), 2);
    dg.unrecoverable.push((MultiIndex(vec![1]), 0));
    dg.hbar_grid = vec![0.02, 0.01];
    dg.caps = Some(RecoverableCaps::for_order(3));
    dg.constraints.insert((MultiIndex(vec![0]), 1), 1e-14);
    dg.warnings.push("w".into());
    let rf = RecoveredForm { form: cf, diagnostics: dg };
    let text = recovered_to_json(&rf);
    assert!(text.contains("\"diagnostics\""));
    let back = recovered_from_json(&text).unwrap();
    assert_eq!(back, rf);
    assert_eq!(recovered_to_json(&back), text);
}

fn sample() -> Vec<SpectrumSample> {
    let cf = canonical_from_json(CANONICAL).unwrap();
    vec![
        bnf_eigenvalues(&cf, 0.1, 0.6).unwrap(),
        bnf_eigenvalues(&cf, 0.05, 0.3).unwrap(),
    ]
}

#[test]
fn spectrum_csv_round_trip() {
    let s = sample();
    let text = spectra_to_csv(&s);
    assert!(text.starts_with("hbar,index,energy,multiplicity,label\n0.1,0,"));
    let back = spectra_from_csv(&text).unwrap();
    assert_eq!(back.len(), 2);
    for (a, b) in s.iter().zip(&back) {
        assert_eq!(a.hbar, b.hbar);
        assert_eq!(a.entries, b.entries);
        assert_eq!(b.e_cut, b.entries.last().unwrap().energy);
    }
    assert_eq!(spectra_to_csv(&back), text);
    assert_eq!(back[0].entries[2].label, Some(Label::Point(MultiIndex(vec![2]))));
}

#[test]
fn cluster_labels_survive_csv() {
    let text = "hbar,index,energy,multiplicity,label\n0.1,0,0.15,1,0-0\n0.1,1,0.3,2,1-0|0-1\n";
    let s = spectra_from_csv(text).unwrap();
    assert_eq!(
        s[0].entries[1].label,
        Some(Label::Cluster(vec![MultiIndex(vec![1, 0]), MultiIndex(vec![0, 1])]))
    );
    assert_eq!(spectra_to_csv(&s), text);
}

#[test]
fn csv_errors() {
    let h = "hbar,index,energy,multiplicity,label\n";
    let unsorted = format!("{h}0.1,0,0.3,1,\n0.1,1,0.2,1,\n");
    let e = spectra_from_csv(&unsorted).unwrap_err();
    assert_eq!(field_of(e), "line 3: energy");
    let cases = [
        ("hbar,index,energy\n".to_string(), "header"),
        (format!("{h}0.1,1,0.3,1,\n"), "line 2: index"),
        (format!("{h}0.1,0,abc,1,\n"), "line 2: energy"),
        (format!("{h}0.1,0,0.3,0,\n"), "line 2: multiplicity"),
        (format!("{h}-0.1,0,0.3,1,\n"), "line 2: hbar"),
        (format!("{h}0.1,0,0.3,1,x-y\n"), "line 2: label"),
        (format!("{h}0.1,0,0.3,1,1-0|0-1\n"), "line 2: label"),
        (format!("{h}0.1,0,0.3,1,\n0.05,0,0.1,1,\n0.1,1,0.4,1,\n"), "line 4: hbar"),
        (format!("{h}0.1,0,0.3,1\n"), "line 2"),
        (h.to_string(), "rows"),
    ];
    for (text, want) in cases {
        assert_eq!(field_of(spectra_from_csv(&text).unwrap_err()), want, "{text}");
    }
}

#[test]
fn atomic_write_replaces_contents() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("out.json");
    write_atomic(&p, b"first").unwrap();
    write_atomic(&p, b"second").unwrap();
    assert_eq!(read_text(&p).unwrap(), "second");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    assert!(matches!(read_text(&dir.path().join("missing")), Err(Error::Io { .. })));
    assert!(write_atomic(&dir.path().join("no/such/dir/x"), b"").is_err());
}
