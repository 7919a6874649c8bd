//! Encoding closed forms, dataset statistics and file round trips.

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use qcnn::dataset::{class_balance, gen_dataset, load_dataset, parse_csv, save_dataset, to_csv, LabeledImage};
use qcnn::encoding::{encode_image, pixel_to_angle, prob_to_angle, AngleImage};
use qcnn::sim::{pure_run, AngleSource, CircuitPlan, GateKind, GateOp};

#[test]
fn pixel_angles_from_the_encoding_figure() {
    assert_eq!(pixel_to_angle(0).unwrap(), 0.0);
    assert_abs_diff_eq!(pixel_to_angle(255).unwrap(), PI, epsilon = 1e-15);
    assert_abs_diff_eq!(pixel_to_angle(125).unwrap(), 125.0 * PI / 255.0, epsilon = 1e-15);
    assert!(pixel_to_angle(256).is_err());
    for p in 0..255 {
        assert!(pixel_to_angle(p + 1).unwrap() > pixel_to_angle(p).unwrap());
    }
}

#[test]
fn prob_angles() {
    assert_eq!(prob_to_angle(0.0).unwrap(), 0.0);
    assert_abs_diff_eq!(prob_to_angle(1.0).unwrap(), PI, epsilon = 1e-15);
    assert_abs_diff_eq!(prob_to_angle(0.5).unwrap(), PI / 2.0, epsilon = 1e-15);
    assert!(prob_to_angle(1.01).is_err());
    assert!(prob_to_angle(-0.01).is_err());
}

#[test]
fn encoding_prefix_layout() {
    let img = AngleImage::from_pixels(2, 2, &[0, 125, 200, 255]).unwrap();
    let gates = encode_image(&img);
    assert_eq!(gates.len(), 4);
    for (k, g) in gates.iter().enumerate() {
        assert_eq!(g.kind, GateKind::Ry);
        assert_eq!(g.wires(), &[k]);
        assert_eq!(g.angle, AngleSource::Data(k));
    }
    let plan = CircuitPlan::new(4, gates, 0, img.angles().to_vec()).unwrap();
    let angles = plan.resolve(&[]).unwrap();
    let want = [0.0, 125.0, 200.0, 255.0].map(|p: f64| p * PI / 255.0);
    for (a, w) in angles.iter().zip(want) {
        assert_abs_diff_eq!(*a, w, epsilon = 1e-15);
    }
}

#[test]
fn all_zero_and_all_white_images() {
    for (px, want) in [(0u8, 0.0), (255u8, 1.0)] {
        let img = AngleImage::from_pixels(2, 2, &[px; 4]).unwrap();
        for wire in 0..4 {
            let plan = CircuitPlan::new(4, encode_image(&img), wire, img.angles().to_vec()).unwrap();
            let p = pure_run(&plan, &plan.resolve(&[]).unwrap()).unwrap();
            assert_abs_diff_eq!(p, want, epsilon = 1e-12);
        }
    }
}

#[test]
fn angle_image_rejects_out_of_range() {
    assert!(AngleImage::new(1, 1, vec![PI + 1e-9]).is_err());
    assert!(AngleImage::new(1, 1, vec![-1e-9]).is_err());
    assert!(AngleImage::new(2, 1, vec![0.0]).is_err());
}

proptest! {
    #[test]
    fn pixel_map_is_linear(a in 0u32..=255, b in 0u32..=255) {
        prop_assume!(a + b <= 255);
        let sum = pixel_to_angle(a).unwrap() + pixel_to_angle(b).unwrap();
        prop_assert!((sum - pixel_to_angle(a + b).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn encoded_probability_closed_form(p in 0u32..=255) {
        let plan = CircuitPlan::new(1, vec![GateOp::ry(0, AngleSource::Data(0))], 0, vec![pixel_to_angle(p).unwrap()]).unwrap();
        let got = pure_run(&plan, &plan.resolve(&[]).unwrap()).unwrap();
        let want = (PI * p as f64 / 510.0).sin().powi(2);
        prop_assert!((got - want).abs() <= 1e-12);
    }
}

#[test]
fn label_one_images_are_flat_and_label_zero_varied() {
    for side in [2, 4, 8] {
        for s in gen_dataset(2000, side, 3).unwrap() {
            let (lo, hi) = (s.pixels().iter().min().unwrap(), s.pixels().iter().max().unwrap());
            if s.label() == 1 {
                assert_eq!(lo, hi);
            } else {
                assert_ne!(lo, hi);
            }
        }
    }
}

#[test]
fn class_balance_within_binomial_bound() {
    for seed in [1, 2, 3] {
        let n = 10_000;
        let f = class_balance(&gen_dataset(n, 2, seed).unwrap());
        assert!((f - 0.5).abs() <= 1.5 / (n as f64).sqrt(), "seed {seed}: {f}");
        assert!((0.47..=0.53).contains(&f));
    }
}

#[test]
fn dataset_shapes_and_determinism() {
    assert_eq!(
        to_csv(&gen_dataset(5, 2, 7).unwrap()).unwrap(),
        to_csv(&gen_dataset(5, 2, 7).unwrap()).unwrap()
    );
    assert_ne!(gen_dataset(5, 2, 7).unwrap(), gen_dataset(5, 2, 8).unwrap());
    assert!(gen_dataset(0, 2, 7).is_err());
    assert!(gen_dataset(5, 3, 7).is_err());
    let d = gen_dataset(1000, 4, 1).unwrap();
    assert_eq!(d.len(), 1000);
    assert!(d.iter().all(|s| s.pixels().len() == 16));
}

#[test]
fn csv_file_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let data = gen_dataset(50, 8, 5).unwrap();
    save_dataset(&data, &path).unwrap();
    assert_eq!(load_dataset(&path).unwrap(), data);

    let p = std::path::Path::new("x.csv");
    let e = parse_csv("label,p0,p1,p2,p3\n0,1,2,3,4\n1,256,256,256,256\n", p).unwrap_err();
    assert!(e.to_string().contains("x.csv:3"), "{e}");
    assert!(parse_csv("label,q0,p1,p2,p3\n", p).is_err());
    assert!(parse_csv("label,p0,p1,p2,p3\n0,1,2,3\n", p).is_err());
    assert!(parse_csv("label,p0,p1,p2,p3\n1,1,2,3,4\n", p).is_err());
    assert!(LabeledImage::new(2, vec![1, 2, 3, 4], 1).is_err());
}
