use gnncost::measurement::{ingest_timings, oracle_time, write_timings, OracleParams};
use gnncost::metrics::{ClusteringMode, GraphMetrics};
use gnncost::{Error, GnnModelKind, Representation, TimingRecord};
use proptest::prelude::*;

fn met(n: usize, m: usize, h: usize) -> GraphMetrics {
    GraphMetrics {
        node_count: n,
        edge_count: m,
        density: 2.0 * m as f64 / (n as f64 * (n as f64 - 1.0)),
        max_degree: h,
        min_degree: 1,
        mean_degree: 2.0 * m as f64 / n as f64,
        mean_clustering: 0.0,
        clustering_mode: ClusteringMode::Exact,
    }
}

fn noiseless() -> OracleParams {
    OracleParams {
        sigma: 0.0,
        ..Default::default()
    }
}

proptest! {
    #[test]
    fn oracle_is_monotone_and_floored(
        n in 2usize..200_000, m in 1usize..2_000_000, h in 1usize..50_000,
        dn in 0usize..10_000, dm in 0usize..100_000, dh in 0usize..5_000,
    ) {
        let p = noiseless();
        for model in GnnModelKind::ALL {
            for repr in Representation::ALL {
                let t = |a, b, c| oracle_time("g", &met(a, b, c), model, repr, &p, 0);
                let base = t(n, m, h);
                prop_assert!(base >= p.t_min);
                prop_assert!(t(n + dn, m, h) >= base);
                prop_assert!(t(n, m + dm, h) >= base);
                prop_assert!(t(n, m, h + dh) >= base);
            }
        }
    }

    #[test]
    fn emit_then_ingest_round_trips(times in prop::collection::vec(1e-6f64..1e6, 1..40)) {
        let records: Vec<TimingRecord> = times
            .iter()
            .enumerate()
            .map(|(i, &t)| TimingRecord {
                graph_id: format!("g{i}"),
                model: GnnModelKind::ALL[i % 4],
                repr: Representation::ALL[i % 2],
                epoch_time_ms: (t * 1e6).round() / 1e6,
            })
            .filter(|r| r.epoch_time_ms > 0.0)
            .collect();
        let mut buf = Vec::new();
        write_timings(&mut buf, &records).unwrap();
        let back = ingest_timings(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), records.len());
        for (a, b) in back.iter().zip(&records) {
            prop_assert_eq!(&a.graph_id, &b.graph_id);
            prop_assert_eq!(format!("{:.6}", a.epoch_time_ms), format!("{:.6}", b.epoch_time_ms));
        }
        // Emitting again is byte-identical.
        let mut again = Vec::new();
        write_timings(&mut again, &back).unwrap();
        prop_assert_eq!(again, buf);
    }
}

#[test]
fn noise_is_deterministic_and_keyed() {
    let p = OracleParams::default();
    let m = met(10_000, 100_000, 300);
    let a = oracle_time("g1", &m, GnnModelKind::Gcn, Representation::Sparse, &p, 4);
    assert_eq!(a, oracle_time("g1", &m, GnnModelKind::Gcn, Representation::Sparse, &p, 4));
    assert_ne!(a, oracle_time("g2", &m, GnnModelKind::Gcn, Representation::Sparse, &p, 4));
    assert_ne!(a, oracle_time("g1", &m, GnnModelKind::Gcn, Representation::EdgeList, &p, 4));
    assert_ne!(a, oracle_time("g1", &m, GnnModelKind::Gcn, Representation::Sparse, &p, 5));
}

#[test]
fn ingest_accepts_mixed_case_and_reports_line_numbers() {
    let csv = "graph_id,model,representation,epoch_time_ms\ng1,gcn,Sparse,12.5\ng1,GCN,edge_list,3\n";
    let recs = ingest_timings(csv.as_bytes()).unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[1].repr, Representation::EdgeList);

    let bad = "graph_id,model,representation,epoch_time_ms\ng1,XYZ,SPARSE,12.5\n";
    assert!(matches!(ingest_timings(bad.as_bytes()), Err(Error::UnknownModel { line: 2, .. })));
    let bad = "graph_id,model,representation,epoch_time_ms\ng1,GCN,SPARSE,1\ng1,GCN,DENSE,1\n";
    assert!(matches!(ingest_timings(bad.as_bytes()), Err(Error::UnknownRepresentation { line: 3, .. })));
    for t in ["-3", "0", "inf", "NaN"] {
        let bad = format!("graph_id,model,representation,epoch_time_ms\ng1,GCN,SPARSE,{t}\n");
        assert!(matches!(ingest_timings(bad.as_bytes()), Err(Error::InvalidTime { line: 2, .. })), "{t}");
    }
    let dup = "graph_id,model,representation,epoch_time_ms\ng1,GCN,SPARSE,1\ng1,gcn,sparse,2\n";
    assert!(matches!(ingest_timings(dup.as_bytes()), Err(Error::DuplicateKey { line: 3, .. })));
}
