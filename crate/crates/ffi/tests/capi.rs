use std::ffi::CString;
use std::ptr;

use biproj_apn_ffi::*;

fn field(m: u32) -> *mut BapField {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { bap_field_new(m, 0, &mut f) }, BapStatus::Ok);
    f
}

fn pair(f: *const BapField, spec: &str) -> Result<*mut BapPair, BapStatus> {
    let text = CString::new(spec).unwrap();
    let mut p = ptr::null_mut();
    match unsafe { bap_pair_from_spec(f, text.as_ptr(), &mut p) } {
        BapStatus::Ok => Ok(p),
        s => Err(s),
    }
}

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { bap_last_error(buf.as_mut_ptr() as *mut _, buf.len()) };
    buf.truncate(n.min(255));
    String::from_utf8(buf).unwrap()
}

#[test]
fn field_arithmetic() {
    let f = field(4);
    unsafe {
        assert_eq!(bap_field_degree(f), 4);
        assert_eq!(bap_field_poly(f), 0x13);
        for a in 1..16u32 {
            let mut inv = 0;
            assert_eq!(bap_field_inv(f, a, &mut inv), BapStatus::Ok);
            let mut one = 0;
            assert_eq!(bap_field_mul(f, a, inv, &mut one), BapStatus::Ok);
            assert_eq!(one, 1);
        }
        let mut r = 0;
        assert_eq!(bap_field_inv(f, 0, &mut r), BapStatus::DivisionByZero);
        assert_eq!(bap_field_mul(f, 16, 1, &mut r), BapStatus::InvalidArgument);
        bap_field_free(f);
    }
}

#[test]
fn bad_inputs() {
    let mut f = ptr::null_mut();
    unsafe {
        assert_ne!(bap_field_new(0, 0, &mut f), BapStatus::Ok);
        assert!(f.is_null());
        assert_eq!(bap_field_new(3, 0, ptr::null_mut()), BapStatus::NullPointer);
        let mut v = false;
        assert_eq!(bap_apn_projective(ptr::null(), &mut v), BapStatus::NullPointer);
        bap_field_free(ptr::null_mut());
        bap_pair_free(ptr::null_mut());
    }
    let f = field(4);
    assert!(pair(f, "nosuch:k=1").is_err());
    // k = 2 shares a factor with m = 4
    assert_eq!(pair(f, "gold:k=2").unwrap_err(), BapStatus::ConditionViolated);
    assert!(!last_error().is_empty());
    unsafe { bap_field_free(f) };
}

#[test]
fn apn_tests_agree() {
    let f = field(3);
    let p = pair(f, "gold:k=1").unwrap();
    let (mut naive, mut proj) = (false, false);
    unsafe {
        assert_eq!(bap_apn_naive(p, &mut naive), BapStatus::Ok);
        assert_eq!(bap_apn_projective(p, &mut proj), BapStatus::Ok);
    }
    assert!(naive && proj);

    // [xy, x^3 + y^3] is not APN
    let c0 = [0u32, 1, 0, 0];
    let c1 = [1u32, 0, 0, 1];
    let mut q = ptr::null_mut();
    unsafe {
        assert_eq!(bap_pair_new(f, 0, 1, c0.as_ptr(), c1.as_ptr(), &mut q), BapStatus::Ok);
        assert_eq!(bap_apn_naive(q, &mut naive), BapStatus::Ok);
        assert_eq!(bap_apn_projective(q, &mut proj), BapStatus::Ok);
        assert_eq!(naive, proj);
        let (mut fx, mut fy) = (0, 0);
        assert_eq!(bap_pair_eval(q, 2, 1, &mut fx, &mut fy), BapStatus::Ok);
        assert_eq!(fx, 2);
        bap_pair_free(q);
        bap_pair_free(p);
        bap_field_free(f);
    }
}

#[test]
fn gold_spectrum() {
    let f = field(3);
    let p = pair(f, "gold:k=1").unwrap();
    let (mut vals, mut counts) = ([0u64; 4], [0u64; 4]);
    let (mut len, mut classical) = (0usize, false);
    unsafe {
        assert_eq!(bap_walsh_spectrum(p, vals.as_mut_ptr(), counts.as_mut_ptr(), 1, &mut len, &mut classical), BapStatus::BufferTooSmall);
        assert_eq!(len, 3);
        assert_eq!(bap_walsh_spectrum(p, vals.as_mut_ptr(), counts.as_mut_ptr(), 4, &mut len, &mut classical), BapStatus::Ok);
        bap_pair_free(p);
        bap_field_free(f);
    }
    assert!(classical);
    assert_eq!(&vals[..3], &[0, 8, 16]);
    assert_eq!(&counts[..3], &[1008, 2688, 336]);
}

#[test]
fn equivalence_and_counts() {
    let f = field(5);
    let a = pair(f, "f1:k=1").unwrap();
    let b = pair(f, "f1:k=4").unwrap();
    let c = pair(f, "f1:k=2").unwrap();
    let (mut ab, mut ac) = (false, true);
    let mut n = 0u64;
    unsafe {
        assert_eq!(bap_equivalent(a, b, &mut ab), BapStatus::Ok);
        assert_eq!(bap_equivalent(a, c, &mut ac), BapStatus::Ok);
        let g = field(3);
        assert_eq!(bap_rootless_count(g, 1, &mut n), BapStatus::Ok);
        assert_eq!(bap_rootless_count(g, 3, &mut n), BapStatus::InvalidArgument);
        bap_field_free(g);
        for p in [a, b, c] {
            bap_pair_free(p);
        }
        bap_field_free(f);
    }
    assert!(ab && !ac);
}

#[test]
fn rootless_count_m3() {
    let f = field(3);
    let mut n = 0u64;
    unsafe {
        assert_eq!(bap_rootless_count(f, 1, &mut n), BapStatus::Ok);
        bap_field_free(f);
    }
    assert_eq!(n, 1176);
}
