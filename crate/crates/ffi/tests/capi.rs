use std::ffi::{CStr, CString};
use std::ptr;

use ecic_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = ecic_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn instance(name: &str) -> *mut EcicInstance {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { ecic_instance_builtin(c(name).as_ptr(), &mut h) },
        EcicStatus::Ok
    );
    h
}

fn matrix(name: &str) -> *mut EcicMatrix {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ecic_matrix_builtin(c(name).as_ptr(), &mut h) }, EcicStatus::Ok);
    h
}

#[test]
fn pentagon_through_the_c_abi() {
    let inst = instance("pentagon");
    let m = matrix("pentagon");
    unsafe {
        assert_eq!((ecic_instance_messages(inst), ecic_instance_receivers(inst)), (5, 5));

        let mut p = EcicParams::default();
        assert_eq!(ecic_params(inst, 2, &mut p), EcicStatus::Ok);
        assert_eq!((p.alpha, p.kappa), (2, 3));

        let mut valid = false;
        assert_eq!(ecic_verify(inst, m, 2, &mut valid), EcicStatus::Ok);
        assert!(valid);
        assert_eq!(ecic_verify(inst, m, 3, &mut valid), EcicStatus::Ok);
        assert!(!valid);

        let mut r = EcicRadius {
            kind: EcicRadiusKind::Unbounded,
            value: 0,
        };
        assert_eq!(ecic_radius(inst, m, &mut r), EcicStatus::Ok);
        assert_eq!((r.kind, r.value), (EcicRadiusKind::Radius, 2));

        let mut s = EcicSearchResult::default();
        let mut w = ptr::null_mut();
        assert_eq!(ecic_search(inst, 2, 2, 0, 2, &mut s, &mut w), EcicStatus::Ok);
        assert!(s.complete);
        assert_eq!((s.optimal_length, s.infeasible_below), (9, 8));
        assert!(!w.is_null());
        assert_eq!(ecic_verify(inst, w, 2, &mut valid), EcicStatus::Ok);
        assert!(valid);
        ecic_matrix_free(w);

        ecic_matrix_free(m);
        ecic_instance_free(inst);
    }
}

#[test]
fn search_bracket_on_tiny_budget() {
    let inst = instance("pentagon");
    unsafe {
        let mut s = EcicSearchResult::default();
        assert_eq!(ecic_search(inst, 2, 2, 1, 1, &mut s, ptr::null_mut()), EcicStatus::Ok);
        assert!(!s.complete);
        assert!(s.has_infeasible_below);
        assert_eq!((s.infeasible_below, s.feasible_at), (7, 10));
        ecic_instance_free(inst);
    }
}

#[test]
fn bounds_json_and_strings() {
    let inst = instance("pentagon");
    let m = matrix("example1");
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(ecic_bounds_json(inst, 2, 2, &mut json), EcicStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        ecic_string_free(json);
        assert_eq!(
            (
                v["alpha_bound"].as_u64(),
                v["kappa_bound"].as_u64(),
                v["singleton"].as_u64()
            ),
            (Some(8), Some(10), Some(7))
        );

        let mut text = ptr::null_mut();
        assert_eq!(ecic_matrix_to_text(m, &mut text), EcicStatus::Ok);
        let t = CStr::from_ptr(text).to_str().unwrap().to_owned();
        ecic_string_free(text);
        let mut back = ptr::null_mut();
        assert_eq!(ecic_matrix_from_text(c(&t).as_ptr(), &mut back), EcicStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(ecic_matrix_to_text(back, &mut again), EcicStatus::Ok);
        assert_eq!(CStr::from_ptr(again).to_str().unwrap(), t);
        ecic_string_free(again);
        ecic_matrix_free(back);
        ecic_matrix_free(m);
        ecic_instance_free(inst);
    }
}

#[test]
fn encode_then_decode_one_error() {
    let inst = instance("example1");
    let m = matrix("example1");
    unsafe {
        let x = [1u8, 0, 1];
        let mut y = [0u8; 4];
        assert_eq!(ecic_encode(m, x.as_ptr(), 3, y.as_mut_ptr(), 4), EcicStatus::Ok);
        y[1] ^= 1;
        let json = c(r#"{"m":3,"n":3,"f":[1,2,3],"X":[[],[],[]]}"#);
        let mut plain = ptr::null_mut();
        assert_eq!(ecic_instance_from_json(json.as_ptr(), &mut plain), EcicStatus::Ok);
        ecic_instance_free(plain);
        for i in 0..3 {
            let mut out = EcicDecodeResult::default();
            // Receiver i knows every message but its own.
            let side: Vec<u8> = (0..3).filter(|&j| j != i).map(|j| x[j]).collect();
            let status = ecic_decode(inst, m, i, y.as_ptr(), 4, side.as_ptr(), 2, 1, &mut out);
            assert_eq!(status, EcicStatus::Ok, "{}", last_error());
            assert_eq!(out.recovered, x[i]);
            assert!(out.within_cap);
            assert!(out.estimate_weight <= 1);
        }
        ecic_matrix_free(m);
        ecic_instance_free(inst);
    }
}

#[test]
fn failures_report_status_and_message() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(ecic_instance_builtin(ptr::null(), &mut h), EcicStatus::NullPointer);
        assert!(last_error().contains("name"));
        assert!(h.is_null());

        assert_eq!(
            ecic_instance_from_json(c("{\"m\":1}").as_ptr(), &mut h),
            EcicStatus::InvalidInput
        );
        assert!(last_error().starts_with("malformed document"));

        let bad = [0xffu8, 0];
        assert_eq!(
            ecic_instance_builtin(bad.as_ptr().cast(), &mut h),
            EcicStatus::InvalidUtf8
        );

        let inst = instance("pentagon");
        let mut p = EcicParams::default();
        assert_eq!(ecic_params(inst, 6, &mut p), EcicStatus::InvalidInput);
        assert!(last_error().contains("prime power"));

        let m = matrix("example1");
        let mut valid = false;
        assert_eq!(ecic_verify(inst, m, 0, &mut valid), EcicStatus::InvalidInput);
        assert_eq!(ecic_verify(inst, ptr::null(), 0, &mut valid), EcicStatus::NullPointer);

        let x = [1u8, 0, 1];
        let mut y = [0u8; 3];
        assert_eq!(
            ecic_encode(m, x.as_ptr(), 3, y.as_mut_ptr(), 3),
            EcicStatus::InvalidInput
        );
        ecic_matrix_free(m);
        ecic_instance_free(inst);

        ecic_string_free(ptr::null_mut());
        ecic_matrix_free(ptr::null_mut());
        ecic_instance_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::fs::read_to_string(format!("{dir}/include/ecic.h")).unwrap();
    let source = std::fs::read_to_string(format!("{dir}/src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from ecic.h");
    }
}
