use chrono::NaiveDate;
use market_entry_core::statements::DynamicsSeries;
use market_entry_core::*;
use proptest::prelude::*;
use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b.abs().max(f64::MIN_POSITIVE)).abs()
    }
}

fn params() -> impl Strategy<Value = MarketParams> {
    (
        1.0..=10.0f64,
        0.1..=100.0f64,
        -0.5..1.0f64,
        -0.5..1.0f64,
        -0.5..1.0f64,
        -0.5..1.0f64,
    )
        .prop_map(|(n, f, it, io, gt, go)| MarketParams {
            country_rating: n,
            compatibility: f,
            inflation_target: it,
            inflation_origin: io,
            growth_target: gt,
            growth_origin: go,
        })
}

fn money() -> impl Strategy<Value = Decimal> {
    (1i64..1_000_000_000_000, 0u32..3).prop_map(|(m, scale)| Decimal::new(m, scale))
}

fn company() -> impl Strategy<Value = CompanyValueInput> {
    (money(), money()).prop_map(|(v, cs)| CompanyValueInput {
        company_value: v,
        social_capital: cs,
        method: ValuationMethod::Anc,
    })
}

/// Straight left-to-right product of the six factors.
fn naive_indicator(p: &MarketParams, c: &CompanyValueInput) -> f64 {
    let v: f64 = c.company_value.to_string().parse().unwrap();
    let cs: f64 = c.social_capital.to_string().parse().unwrap();
    p.country_rating
        * p.compatibility
        * ((1.0 + p.inflation_target) / (1.0 + p.inflation_origin))
        * ((1.0 + p.growth_target) / (1.0 + p.growth_origin))
        * (v / cs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn indicator_matches_direct_product(p in params(), c in company()) {
        let r = compute_indicator(&p, &c).unwrap();
        prop_assert!(rel(r.i, naive_indicator(&p, &c)) <= 1e-12);
    }

    #[test]
    fn log_decomposition(p in params(), c in company()) {
        let r = compute_indicator(&p, &c).unwrap();
        prop_assert!((r.i_star - (r.macro_term + r.micro_term)).abs() <= 1e-12);
        prop_assert!((r.i_star - r.i.log10()).abs() == 0.0);
    }

    #[test]
    fn currency_scale_invariance(p in params(), c in company(), k in 1i64..10_000) {
        let base = compute_indicator(&p, &c).unwrap();
        let scaled = CompanyValueInput {
            company_value: c.company_value * Decimal::from(k),
            social_capital: c.social_capital * Decimal::from(k),
            method: c.method,
        };
        let r = compute_indicator(&p, &scaled).unwrap();
        prop_assert!(rel(r.i, base.i) <= 1e-12);
    }

    #[test]
    fn indicator_monotonicity(p in params(), c in company(), bump in 1.01..1.5f64) {
        let base = compute_indicator(&p, &c).unwrap().i;
        let eval = |q: MarketParams, v: &CompanyValueInput| compute_indicator(&q, v).map(|r| r.i);

        let mut q = p; q.country_rating = (p.country_rating * bump).min(10.0);
        if q.country_rating > p.country_rating { prop_assert!(eval(q, &c).unwrap() > base); }
        let mut q = p; q.compatibility = (p.compatibility * bump).min(100.0);
        if q.compatibility > p.compatibility { prop_assert!(eval(q, &c).unwrap() > base); }
        let mut q = p; q.inflation_target += 0.05;
        prop_assert!(eval(q, &c).unwrap() > base);
        let mut q = p; q.growth_target += 0.05;
        prop_assert!(eval(q, &c).unwrap() > base);
        let mut q = p; q.inflation_origin += 0.05;
        prop_assert!(eval(q, &c).unwrap() < base);
        let mut q = p; q.growth_origin += 0.05;
        prop_assert!(eval(q, &c).unwrap() < base);

        let more_v = CompanyValueInput { company_value: c.company_value * Decimal::TWO, ..c.clone() };
        prop_assert!(eval(p, &more_v).unwrap() > base);
        let more_cs = CompanyValueInput { social_capital: c.social_capital * Decimal::TWO, ..c.clone() };
        prop_assert!(eval(p, &more_cs).unwrap() < base);
    }

    #[test]
    fn bands_are_total_and_ordered(x in -1e6..1e6f64) {
        let band = recommend(x).unwrap().band_id;
        let (lo, hi) = band.bounds();
        prop_assert!(lo <= x && x < hi);
        let next = recommend(x + 0.5).unwrap().band_id;
        prop_assert!(next >= band);
    }

    #[test]
    fn dcf_matches_term_by_term_oracle(
        cf in -1e9..1e9f64,
        r in 0.001..0.5f64,
        spread in 0.001..0.4f64,
        n in 1i32..60,
    ) {
        let g = r - spread;
        prop_assume!(g > -0.9);
        let cf = Decimal::from_f64_retain(cf).unwrap().round_dp(2);
        let base: f64 = cf.to_string().parse().unwrap();
        let p = DcfParams { reference_net_cashflow: cf, discount_rate: r, perpetual_growth: g, horizon_years: n };
        let v = value_dcf(&p).unwrap().value.to_f64().unwrap();
        let mut oracle = 0.0;
        for i in 1..=n {
            oracle += base * (1.0 + g).powi(i) / (1.0 + r).powi(i);
        }
        oracle += base * (1.0 + g).powi(n) * (1.0 + g) / (r - g) / (1.0 + r).powi(n);
        prop_assert!(rel(v, oracle) <= 1e-10 || (v - oracle).abs() < 1e-6, "{v} vs {oracle}");
    }

    #[test]
    fn dcf_zero_growth_is_perpetuity(cf in 1i64..10_000_000_000, r in 0.001..0.5f64, n in 1i32..100) {
        let p = DcfParams { reference_net_cashflow: Decimal::from(cf), discount_rate: r, perpetual_growth: 0.0, horizon_years: n };
        let v = value_dcf(&p).unwrap().value.to_f64().unwrap();
        prop_assert!(rel(v, cf as f64 / r) <= 1e-12, "{v} vs {}", cf as f64 / r);
    }

    #[test]
    fn dcf_linear_in_cashflow(cf in 1i64..1_000_000_000, k in 2i64..1000, r in 0.01..0.3f64, n in 1i32..30) {
        let g = r / 2.0;
        let mk = |c: i64| DcfParams { reference_net_cashflow: Decimal::from(c), discount_rate: r, perpetual_growth: g, horizon_years: n };
        let one = value_dcf(&mk(cf)).unwrap().value.to_f64().unwrap();
        let many = value_dcf(&mk(cf * k)).unwrap().value.to_f64().unwrap();
        prop_assert!(rel(many, one * k as f64) <= 1e-12);
    }

    #[test]
    fn dcf_monotone_in_rates(cf in 1i64..1_000_000_000, r in 0.02..0.3f64, n in 1i32..30) {
        let g = r / 3.0;
        let mk = |r: f64, g: f64| value_dcf(&DcfParams {
            reference_net_cashflow: Decimal::from(cf), discount_rate: r, perpetual_growth: g, horizon_years: n,
        }).unwrap().value;
        prop_assert!(mk(r + 0.01, g) < mk(r, g));
        prop_assert!(mk(r, g + 0.001) > mk(r, g));
    }

    #[test]
    fn dcf_singularity_whenever_r_not_above_g(r in -0.5..0.5f64, excess in 0.0..0.5f64) {
        let p = DcfParams { reference_net_cashflow: Decimal::ONE_HUNDRED, discount_rate: r, perpetual_growth: r + excess, horizon_years: 5 };
        prop_assert_eq!(value_dcf(&p).unwrap_err().code(), "GORDON_SINGULARITY");
    }

    #[test]
    fn present_value_composes(fv in -1e9..1e9f64, i in -0.5..1.0f64, a in 0u32..40, b in 0u32..40) {
        let direct = present_value(fv, i, a + b).unwrap().value;
        let staged = present_value(present_value(fv, i, a).unwrap().value, i, b).unwrap().value;
        prop_assert!(rel(staged, direct) <= 1e-12 || fv == 0.0);
    }
}

fn sheet(values: &[(Side, i64)]) -> FinancialStatements {
    let items = values
        .iter()
        .enumerate()
        .map(|(k, (side, v))| LineItem {
            item_id: format!("item{k}"),
            label: format!("Item {k}"),
            statement: side.statement(),
            side: *side,
            values: vec![Some(Decimal::from(*v))],
        })
        .collect();
    FinancialStatements::new("p", "EUR", vec![period()], items).unwrap()
}

fn period() -> NaiveDate {
    NaiveDate::from_ymd_opt(2007, 12, 31).unwrap()
}

fn balance_items() -> impl Strategy<Value = Vec<(Side, i64)>> {
    prop::collection::vec(
        (
            prop_oneof![Just(Side::Asset), Just(Side::Liability)],
            0i64..1_000_000,
        ),
        1..8,
    )
}

proptest! {
    #[test]
    fn anc_is_order_independent(items in balance_items(), fair in prop::collection::vec(0i64..2_000_000, 8), seed in any::<u64>()) {
        let st = sheet(&items);
        let mut adjustments: Vec<Adjustment> = items.iter().enumerate().map(|(k, (side, v))| Adjustment {
            item_ref: format!("item{k}"),
            kind: if *side == Side::Asset { AdjustmentKind::RevalueAsset } else { AdjustmentKind::RevalueLiability },
            book_value: Decimal::from(*v),
            fair_value: Decimal::from(fair[k]),
            note: String::new(),
        }).collect();
        adjustments.push(Adjustment {
            item_ref: "guarantee".into(), kind: AdjustmentKind::AddOffBalanceLiability,
            book_value: Decimal::ZERO, fair_value: Decimal::from(fair[7]), note: String::new(),
        });
        let forward = value_anc(&st, period(), &adjustments).unwrap().value;
        let mut shuffled = adjustments.clone();
        let len = shuffled.len();
        shuffled.rotate_left((seed as usize) % len);
        shuffled.reverse();
        prop_assert_eq!(value_anc(&st, period(), &shuffled).unwrap().value, forward);

        // independent route: fair assets minus fair liabilities
        let assets: i64 = items.iter().enumerate().filter(|(_, (s, _))| *s == Side::Asset).map(|(k, _)| fair[k]).sum();
        let liabilities: i64 = items.iter().enumerate().filter(|(_, (s, _))| *s == Side::Liability).map(|(k, _)| fair[k]).sum();
        prop_assert_eq!(forward, Decimal::from(assets - liabilities - fair[7]));
    }

    #[test]
    fn anc_neutral_adjustment(items in balance_items()) {
        let st = sheet(&items);
        let book = value_anc(&st, period(), &[]).unwrap().value;
        let neutral: Vec<Adjustment> = items.iter().enumerate().map(|(k, (side, v))| Adjustment {
            item_ref: format!("item{k}"),
            kind: if *side == Side::Asset { AdjustmentKind::RevalueAsset } else { AdjustmentKind::RevalueLiability },
            book_value: Decimal::from(*v),
            fair_value: Decimal::from(*v),
            note: String::new(),
        }).collect();
        prop_assert_eq!(value_anc(&st, period(), &neutral).unwrap().value, book);
    }

    #[test]
    fn dynamics_unit_free(values in prop::collection::vec(prop::option::weighted(0.9, 1i64..1_000_000), 1..8), k in 1i64..1000) {
        let periods: Vec<NaiveDate> = (0..values.len()).map(|y| NaiveDate::from_ymd_opt(2000 + y as i32, 12, 31).unwrap()).collect();
        let item = |scale: i64| LineItem {
            item_id: "x".into(), label: "X".into(), statement: StatementKind::BalanceSheet, side: Side::Asset,
            values: values.iter().map(|v| v.map(|v| Decimal::from(v * scale))).collect(),
        };
        let a = DynamicsSeries::from_item(&periods, &item(1));
        let b = DynamicsSeries::from_item(&periods, &item(k));
        prop_assert_eq!(a.deltas.len(), periods.len() - 1);
        prop_assert_eq!(a.growth.len(), periods.len() - 1);
        prop_assert_eq!(a.index.len(), periods.len());
        for (x, y) in a.growth.iter().zip(&b.growth).chain(a.index.iter().zip(&b.index)) {
            match (x, y) {
                (Some(x), Some(y)) => prop_assert!(rel(*y, *x) <= 1e-12),
                (None, None) => {}
                _ => prop_assert!(false, "definedness differs"),
            }
        }
    }

    #[test]
    fn statements_round_trip(
        rows in prop::collection::vec((prop_oneof![Just(Side::Asset), Just(Side::Expense), Just(Side::Equity)],
            prop::collection::vec(prop::option::of((-1_000_000_000i64..1_000_000_000, 0u32..4)), 3)), 1..6)
    ) {
        let periods = vec![
            NaiveDate::from_ymd_opt(2005, 12, 31).unwrap(),
            NaiveDate::from_ymd_opt(2006, 6, 30).unwrap(),
            NaiveDate::from_ymd_opt(2007, 12, 31).unwrap(),
        ];
        let items = rows.iter().enumerate().map(|(k, (side, vals))| LineItem {
            item_id: format!("i{k}"), label: format!("Item, no. {k}"), statement: side.statement(), side: *side,
            values: vals.iter().map(|v| v.map(|(m, s)| Decimal::new(m, s))).collect(),
        }).collect();
        let st = FinancialStatements::new("co", "RON", periods, items).unwrap();
        let csv = st.to_csv_string();
        let back = FinancialStatements::from_csv_str(&csv).unwrap();
        prop_assert_eq!(back.to_csv_string(), csv);
        // the CSV form drops periods nobody reports; compare values period by period
        for item in &st.items {
            for (idx, p) in st.periods.iter().enumerate() {
                let got = back.value(&item.item_id, *p);
                prop_assert_eq!(got, item.values[idx]);
                if let Some(v) = got { prop_assert_eq!(v.to_string(), item.values[idx].unwrap().to_string()); }
            }
        }
        let json_back = FinancialStatements::from_json_str(&st.to_json_string()).unwrap();
        prop_assert_eq!(json_back, st);
    }
}

#[test]
fn boundaries_follow_lower_inclusive_rule() {
    let cases = [
        (0.0, BandId::Greenfield, BandId::Acquisition),
        (1.6, BandId::Acquisition, BandId::MergerAcquisition),
        (2.0, BandId::MergerAcquisition, BandId::Cooperation),
        (5.0, BandId::Cooperation, BandId::Export),
    ];
    for (b, below, at_or_above) in cases {
        assert_eq!(recommend(b - 1e-9).unwrap().band_id, below);
        assert_eq!(recommend(b).unwrap().band_id, at_or_above);
        assert_eq!(recommend(b + 1e-9).unwrap().band_id, at_or_above);
    }
}

#[test]
fn grade_ladders_are_monotone() {
    let moodys = [
        "Aaa", "Aa1", "Aa2", "Aa3", "A1", "A2", "A3", "Baa1", "Baa2", "Baa3", "Ba1", "Ba2", "Ba3",
        "B1", "B2", "B3", "Caa1", "Caa2", "Caa3", "Ca", "C",
    ];
    let sp = [
        "AAA", "AA+", "AA", "AA-", "A+", "A", "A-", "BBB+", "BBB", "BBB-", "BB+", "BB", "BB-",
        "B+", "B", "B-", "CCC+", "CCC", "CCC-", "CC", "C", "D",
    ];
    for (agency, ladder) in [(Agency::Moodys, &moodys[..]), (Agency::Sp, &sp[..])] {
        let ns: Vec<f64> = ladder
            .iter()
            .map(|s| grade_to_n(&RatingGrade::parse(agency, s).unwrap()))
            .collect();
        assert!(ns.windows(2).all(|w| w[0] >= w[1]), "{agency:?}: {ns:?}");
        assert!(ns.iter().all(|n| (1.0..=10.0).contains(n)));
    }
}

#[test]
fn bundled_dataset_round_trip() {
    let ds = RatingsDataset::bundled();
    for country in ds.countries() {
        for cat in [
            RatingCategory::LongTermCredit,
            RatingCategory::FxBankDeposits,
        ] {
            let events = ds.rating_history(country, cat).unwrap();
            assert!(events.windows(2).all(|w| w[0].date < w[1].date));
            for e in events {
                let n = grade_to_n(&e.grade);
                assert!((1.0..=10.0).contains(&n));
            }
        }
    }
}
