use proptest::prelude::*;
use qle_cli::config::{parse_config, Scenario};
use qle_cli::output::{format_float, Table};
use qle_cli::units::{parse_quantity, Dimension};

proptest! {
    #[test]
    fn csv_floats_round_trip(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        prop_assert_eq!(format_float(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
    }

    #[test]
    fn csv_has_one_line_per_row_plus_header(rows in 0usize..40, cols in 1usize..6, seed in any::<u32>()) {
        let names: Vec<String> = (0..cols).map(|j| format!("c{j}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut t = Table::new("t", &refs);
        for i in 0..rows {
            t.push((0..cols).map(|j| ((seed as f64) * 1e-3 + (i * cols + j) as f64).into()).collect());
        }
        let csv = t.to_csv().unwrap();
        prop_assert_eq!(csv.lines().count(), rows + 1);
        prop_assert!(csv.lines().all(|l| l.split(',').count() == cols));
    }

    #[test]
    fn prefixed_units_scale_exactly(m in -1_000_000i64..1_000_000) {
        let x = m as f64;
        prop_assert_eq!(parse_quantity(&format!("{x} ms"), Dimension::Time).unwrap(), x / 1e3);
        prop_assert_eq!(parse_quantity(&format!("{x} us"), Dimension::Time).unwrap(), x / 1e6);
        prop_assert_eq!(parse_quantity(&format!("{x} G"), Dimension::MagneticField).unwrap(), x / 1e4);
        prop_assert_eq!(parse_quantity(&format!("{x} kHz"), Dimension::Frequency).unwrap(), x * 1e3);
    }

    #[test]
    fn qlr_shorter_than_optical_pulse_is_rejected(t_qlr_ns in 1u32..10_000, t_op_ns in 1u32..10_000) {
        let text = format!(
            "scenario = \"qle_snr_vs_n\"\n[sensor]\nt_op = \"{t_op_ns} ns\"\nt_qlr = \"{t_qlr_ns} ns\"\n"
        );
        let parsed = parse_config(&text);
        prop_assert_eq!(parsed.is_ok(), t_qlr_ns >= t_op_ns);
        if let Ok(c) = parsed {
            prop_assert_eq!(c.scenario, Scenario::QleSnrVsN);
        }
    }
}
