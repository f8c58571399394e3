mod common;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use proptest::prelude::*;

use lenori::events::{GapTolerance, ResilienceEvent};
use lenori::ingest::write_outages;
use lenori::stats::{rse_aleno, rse_lenori};
use lenori::{
    decompose, filter_forced, group_events, parse_outages, pmf_table, select_large, sliding_window, CauseGroup,
    EventCatalog, LargeEventSlice, MetricsReport, OutageRecord, Partition, PmfScope, ReportOptions, Schema,
    Season, TailModel,
};

use common::rel;

fn origin() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2015, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap()
}

fn outage() -> impl Strategy<Value = (u32, u32, u8, bool, bool)> {
    (0u32..200_000, 0u32..600, 0u8..4, any::<bool>(), any::<bool>())
}

fn records(max: usize) -> impl Strategy<Value = Vec<OutageRecord>> {
    prop::collection::vec(outage(), 0..max).prop_map(|raw| {
        raw.into_iter()
            .enumerate()
            .map(|(i, (offset, len, cause, forced, momentary))| {
                let start = origin() + Duration::minutes(offset as i64);
                OutageRecord {
                    outage_id: format!("o{i}"),
                    start,
                    end: start + Duration::minutes(len as i64),
                    cause_code: format!("C{cause}"),
                    forced,
                    momentary,
                }
            })
            .collect()
    })
}

fn season_of(i: u8) -> Season {
    Season::ALL[i as usize % 2]
}

fn cause_of(i: u8) -> CauseGroup {
    CauseGroup::ALL[i as usize % 3]
}

/// Catalogs over 2015..2020 with a heavy-ish size mix.
fn catalogs() -> impl Strategy<Value = EventCatalog> {
    let size = prop_oneof![1u64..10, 10u64..40, 40u64..5000];
    (
        prop::collection::vec((size, 0u32..(6 * 525_000), any::<u8>(), any::<u8>()), 0..120),
        0.5f64..20.0,
    )
        .prop_map(|(raw, n_year)| {
            let events: Vec<ResilienceEvent> = raw
                .into_iter()
                .map(|(size, offset, s, c)| {
                    let start = origin() + Duration::minutes(offset as i64);
                    ResilienceEvent {
                        event_id: 0,
                        outage_ids: Vec::new(),
                        size,
                        start,
                        end: start,
                        season: season_of(s),
                        cause_group: cause_of(c),
                        tie_flag: false,
                    }
                })
                .collect();
            EventCatalog::from_events(events, n_year).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn forced_filter_is_idempotent(rs in records(60)) {
        let once = filter_forced(&rs);
        prop_assert!(once.iter().all(|r| r.forced));
        prop_assert_eq!(filter_forced(&once), once.clone());
    }

    #[test]
    fn outage_file_round_trip(rs in records(60)) {
        let mut buf = Vec::new();
        write_outages(&rs, &mut buf).unwrap();
        let parsed = parse_outages(buf.as_slice(), &Schema::default()).unwrap();
        prop_assert!(parsed.rejects.is_empty());
        prop_assert_eq!(parsed.records, rs);
    }

    #[test]
    fn grouping_partitions_records(rs in records(80), gap in 0u64..240) {
        let cat = group_events(&rs, GapTolerance::Minutes(gap));
        let mut ids: Vec<&String> = cat.events.iter().flat_map(|e| &e.outage_ids).collect();
        ids.sort();
        let mut expected: Vec<&String> = rs.iter().map(|r| &r.outage_id).collect();
        expected.sort();
        prop_assert_eq!(ids, expected);
        prop_assert!(cat.events.iter().all(|e| e.size as usize == e.outage_ids.len()));
        prop_assert!(cat.events.windows(2).all(|w| w[0].start <= w[1].start));
    }

    #[test]
    fn wider_gap_never_adds_events(rs in records(80), gap in 0u64..240, extra in 0u64..240) {
        let narrow = group_events(&rs, GapTolerance::Minutes(gap)).len();
        let wide = group_events(&rs, GapTolerance::Minutes(gap + extra)).len();
        prop_assert!(wide <= narrow);
    }

    #[test]
    fn grouping_ignores_input_order(rs in records(60), gap in 0u64..120) {
        let mut reversed = rs.clone();
        reversed.reverse();
        prop_assert_eq!(
            group_events(&rs, GapTolerance::Minutes(gap)),
            group_events(&reversed, GapTolerance::Minutes(gap))
        );
    }

    #[test]
    fn unbounded_gap_gives_one_event(rs in records(60)) {
        let cat = group_events(&rs, GapTolerance::Unbounded);
        prop_assert_eq!(cat.len(), usize::from(!rs.is_empty()));
    }

    #[test]
    fn metric_identities(cat in catalogs(), threshold in 2u64..30) {
        let slice = select_large(&cat, threshold).unwrap();
        prop_assume!(!slice.is_empty());
        let aleno = slice.aleno().unwrap();
        prop_assert!(rel(slice.lenori(), slice.large_event_frequency() * aleno) <= 1e-12);
        prop_assert!(rel(slice.tail_index_estimate().unwrap(), 1.0 / aleno) <= 1e-12);
        prop_assert!(aleno > 0.0);
    }

    #[test]
    fn decompositions_add_up(cat in catalogs()) {
        for partition in [Partition::Season, Partition::Cause] {
            let d = decompose(&cat, partition, 10, &ReportOptions::default()).unwrap();
            prop_assert!(d.additivity_residual() <= 1e-12, "residual {}", d.additivity_residual());
            let n: u64 = d.slices.iter().map(|(_, r)| r.n_large).sum();
            prop_assert_eq!(n, d.all.n_large);
            prop_assert!(d.slices.iter().all(|(_, r)| r.n_year == d.all.n_year && r.threshold == 10));
        }
    }

    #[test]
    fn random_partitions_add_up(cat in catalogs(), groups in 1usize..7, salt in any::<u64>()) {
        let slice = select_large(&cat, 10).unwrap();
        let parts = slice.partition(|i, _| (i as u64 ^ salt).wrapping_mul(0x9E37_79B9_7F4A_7C15) % groups as u64);
        let sum: f64 = parts.iter().map(|(_, p)| p.lenori()).sum();
        prop_assert!(rel(sum, slice.lenori()) <= 1e-12);
    }

    #[test]
    fn pmf_counts_cover_catalog(cat in catalogs()) {
        let t = pmf_table(&cat, PmfScope::AllEvents).unwrap();
        prop_assert_eq!(t.total_count() as usize, cat.len());
        if !cat.is_empty() {
            let total: f64 = t.rows.iter().map(|r| r.probability).sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn report_json_round_trip(cat in catalogs(), threshold in 2u64..30) {
        let report = MetricsReport::compute(&select_large(&cat, threshold).unwrap(), &ReportOptions::default()).unwrap();
        let text = serde_json::to_string(&report.to_json()).unwrap();
        let back = MetricsReport::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, report);
    }

    #[test]
    fn full_span_window_is_whole_catalog(cat in catalogs()) {
        prop_assume!(!cat.is_empty());
        let (first, last) = cat.year_range().unwrap();
        let span = (last - first + 1) as u32;
        let opts = ReportOptions::default();
        let table = sliding_window(&cat, span, 10, &opts).unwrap();
        let whole = cat.clone().with_n_year(f64::from(span)).unwrap();
        let expected = MetricsReport::compute(&select_large(&whole, 10).unwrap(), &opts).unwrap();
        prop_assert_eq!(table.rows.len(), 1);
        prop_assert_eq!(&table.rows[0].report, &expected);
    }

    #[test]
    fn window_rows_are_consecutive(cat in catalogs(), window in 1u32..4) {
        prop_assume!(!cat.is_empty());
        let (first, last) = cat.year_range().unwrap();
        let span = (last - first + 1) as u32;
        match sliding_window(&cat, window, 10, &ReportOptions::default()) {
            Ok(t) => {
                prop_assert_eq!(t.rows.len() as u32, span - window + 1);
                prop_assert!(t.rows.windows(2).all(|w| w[1].start_year == w[0].start_year + 1));
                prop_assert!(t.rows.iter().all(|r| r.end_year - r.start_year + 1 == window as i32));
            }
            Err(_) => prop_assert!(window > span),
        }
    }

    #[test]
    fn rse_scales_as_inverse_root_n(alpha in 0.3f64..3.0, threshold in 2u64..40, n in 1.0f64..1e5) {
        let m = TailModel::new(alpha, threshold).unwrap();
        let len1 = rse_lenori(&m, 1.0).unwrap();
        let ale1 = rse_aleno(&m, 1.0).unwrap();
        prop_assert!(rel(rse_lenori(&m, n).unwrap() * n.sqrt(), len1) <= 1e-12);
        prop_assert!(rel(rse_aleno(&m, n).unwrap() * n.sqrt(), ale1) <= 1e-12);
        prop_assert!(ale1 < len1);
    }

    #[test]
    fn shadow_shift(sizes in prop::collection::vec(10u64..100_000, 1..200), factor in 0.2f64..5.0) {
        let slice = LargeEventSlice::new(sizes, 10, 3.0).unwrap();
        let shadow = slice.scaled(factor);
        let shift = shadow.aleno().unwrap() - slice.aleno().unwrap();
        prop_assert!((shift - factor.ln()).abs() <= 1e-12 * (1.0 + slice.aleno().unwrap().abs()));
        let lshift = shadow.lenori() - slice.lenori();
        prop_assert!(rel(lshift, slice.large_event_frequency() * factor.ln()) <= 1e-9);
    }
}
