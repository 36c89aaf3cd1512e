use std::ffi::{CStr, CString};
use std::ptr;

use gnncost::metrics::{compute_metrics, ClusteringMode};
use gnncost::regression::{fit_compound, RegressionConfig};
use gnncost::{parse_edge_list, GnnModelKind, Representation};
use gnncost_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = gnc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn path_graph(n: u32) -> String {
    (0..n - 1).map(|i| format!("{i} {}\n", i + 1)).collect()
}

fn fitted_model_json() -> (String, Vec<gnncost::GraphMetrics>) {
    let mets: Vec<_> = (5..40)
        .map(|n| {
            let mut text = path_graph(n);
            text.push_str(&format!("0 {}\n", n / 2));
            compute_metrics(&parse_edge_list(&text).unwrap(), ClusteringMode::Exact).unwrap()
        })
        .collect();
    let y: Vec<f64> = mets.iter().map(|m| 3.0 + 0.5 * m.edge_count as f64).collect();
    let cm = fit_compound(GnnModelKind::Gat, Representation::EdgeList, &mets, &y, &RegressionConfig::default())
        .unwrap();
    (cm.to_json().unwrap(), mets)
}

#[test]
fn graph_round_trip_and_metrics() {
    let text = c("0 1\n1 2\n2 0\n2 3\n");
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { gnc_graph_parse(text.as_ptr(), &mut g) }, GncStatus::Ok);
    assert_eq!(unsafe { gnc_graph_node_count(g) }, 4);
    assert_eq!(unsafe { gnc_graph_edge_count(g) }, 4);

    let mut m = std::mem::MaybeUninit::<GncMetrics>::uninit();
    assert_eq!(unsafe { gnc_graph_metrics(g, true, 0, 0, m.as_mut_ptr()) }, GncStatus::Ok);
    let m = unsafe { m.assume_init() };
    assert_eq!((m.node_count, m.edge_count, m.max_degree, m.min_degree), (4, 4, 3, 1));
    assert!(m.clustering_exact);
    // Triangle nodes 0 and 1 close their only wedge; node 2 closes 1 of 3.
    assert!((m.mean_clustering - (1.0 + 1.0 + 1.0 / 3.0) / 4.0).abs() < 1e-12);
    unsafe { gnc_graph_free(g) };
}

#[test]
fn parse_errors_carry_line_numbers() {
    let text = c("0 1\n1 x\n");
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { gnc_graph_parse(text.as_ptr(), &mut g) }, GncStatus::Parse);
    assert!(g.is_null());
    assert!(last_error().contains("line 2"), "{}", last_error());

    let empty = c("# nothing\n");
    assert_eq!(unsafe { gnc_graph_parse(empty.as_ptr(), &mut g) }, GncStatus::EmptyGraph);
}

#[test]
fn null_arguments_are_rejected() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { gnc_graph_parse(ptr::null(), &mut g) }, GncStatus::NullPointer);
    let text = c("0 1\n");
    assert_eq!(unsafe { gnc_graph_parse(text.as_ptr(), ptr::null_mut()) }, GncStatus::NullPointer);
    let mut out = 0.0;
    assert_eq!(
        unsafe { gnc_model_predict(ptr::null(), ptr::null(), &mut out) },
        GncStatus::NullPointer
    );
    assert_eq!(unsafe { gnc_graph_node_count(ptr::null()) }, 0);
    unsafe {
        gnc_graph_free(ptr::null_mut());
        gnc_model_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8_is_reported() {
    let bad = CString::new(vec![0xffu8, 0xfe]).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { gnc_graph_parse(bad.as_ptr(), &mut g) }, GncStatus::InvalidUtf8);
}

#[test]
fn missing_files() {
    let p = c("/nonexistent/graph.el");
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { gnc_graph_load(p.as_ptr(), &mut g) }, GncStatus::MissingFile);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { gnc_model_load(p.as_ptr(), &mut m) }, GncStatus::MissingFile);
}

#[test]
fn model_predictions_match_the_library() {
    let (json, mets) = fitted_model_json();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("gat_edge_list.json");
    std::fs::write(&file, &json).unwrap();

    let mut model = ptr::null_mut();
    let p = c(file.to_str().unwrap());
    assert_eq!(unsafe { gnc_model_load(p.as_ptr(), &mut model) }, GncStatus::Ok);
    let (mut kind, mut repr) = (GncModelKind::Gcn, GncRepresentation::Sparse);
    assert_eq!(unsafe { gnc_model_design(model, &mut kind, &mut repr) }, GncStatus::Ok);
    assert_eq!((kind, repr), (GncModelKind::Gat, GncRepresentation::EdgeList));

    let lib = gnncost::regression::CompoundModel::from_json(&json).unwrap();
    for met in &mets {
        let cm: GncMetrics = met.into();
        let mut ms = f64::NAN;
        assert_eq!(unsafe { gnc_model_predict(model, &cm, &mut ms) }, GncStatus::Ok);
        assert_eq!(ms.to_bits(), lib.predict(met).to_bits());
    }
    unsafe { gnc_model_free(model) };
}

#[test]
fn model_json_errors() {
    let mut model = ptr::null_mut();
    let junk = c("{ not json");
    assert_eq!(unsafe { gnc_model_from_json(junk.as_ptr(), &mut model) }, GncStatus::Format);

    let (json, _) = fitted_model_json();
    let future = c(&json.replacen("\"version\": 1", "\"version\": 99", 1));
    assert_eq!(unsafe { gnc_model_from_json(future.as_ptr(), &mut model) }, GncStatus::Version);
    assert!(model.is_null());
}

#[test]
fn choice_and_version() {
    assert_eq!(gnc_choose_repr(10.0, 12.0), GncRepresentation::Sparse);
    assert_eq!(gnc_choose_repr(12.0, 10.0), GncRepresentation::EdgeList);
    assert_eq!(gnc_choose_repr(10.0, 10.0), GncRepresentation::Sparse);
    let v = unsafe { CStr::from_ptr(gnc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
