use std::ffi::CStr;
use std::ptr;

use fairdiv_ffi::*;

fn instance(rows: &[&[f64]]) -> *mut FairdivInstance {
    let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    let mut out = ptr::null_mut();
    let status =
        unsafe { fairdiv_instance_new(rows.len(), rows[0].len(), flat.as_ptr(), &mut out) };
    assert_eq!(status, FairdivStatus::Ok);
    out
}

fn last_error() -> String {
    let p = fairdiv_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn every_algorithm_round_trips() {
    let inst = instance(&[&[3.0, 1.0, 2.0], &[1.0, 3.0, 2.0]]);
    unsafe {
        assert_eq!(fairdiv_instance_n_agents(inst), 2);
        assert_eq!(fairdiv_instance_n_items(inst), 3);
        for alg in [
            FairdivAlgorithm::Maxsum,
            FairdivAlgorithm::Leximin,
            FairdivAlgorithm::Propm,
            FairdivAlgorithm::Mms34,
        ] {
            let mut alloc = ptr::null_mut();
            assert_eq!(fairdiv_allocate(inst, alg, &mut alloc), FairdivStatus::Ok);
            let mut u = [0.0; 2];
            assert_eq!(
                fairdiv_utilities(inst, alloc, u.as_mut_ptr(), 2),
                FairdivStatus::Ok
            );
            assert!(u[0] >= 3.0 - 1e-9 && u[1] >= 3.0 - 1e-9, "{alg:?}: {u:?}");
            fairdiv_allocation_free(alloc);
        }
        fairdiv_instance_free(inst);
    }
}

#[test]
fn leximin_splits_a_single_item() {
    let inst = instance(&[&[1000.0], &[1000.0]]);
    unsafe {
        let mut alloc = ptr::null_mut();
        assert_eq!(
            fairdiv_allocate(inst, FairdivAlgorithm::Leximin, &mut alloc),
            FairdivStatus::Ok
        );
        let mut share = 0.0;
        assert_eq!(
            fairdiv_allocation_share(alloc, 0, 0, &mut share),
            FairdivStatus::Ok
        );
        assert!((share - 0.5).abs() < 1e-6);
        let mut owner = 7;
        assert_eq!(
            fairdiv_allocation_owner(alloc, 0, &mut owner),
            FairdivStatus::Ok
        );
        assert_eq!(owner, -1);
        fairdiv_allocation_free(alloc);
        fairdiv_instance_free(inst);
    }
}

#[test]
fn completion_and_certificates() {
    let inst = instance(&[&[5.0, 5.0, 1.0, 1.0, 1.0], &[5.0, 5.0, 1.0, 1.0, 1.0]]);
    unsafe {
        let (mut partial, mut done) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            fairdiv_allocate(inst, FairdivAlgorithm::Mms34, &mut partial),
            FairdivStatus::Ok
        );
        assert_eq!(
            fairdiv_complete_leftovers(inst, partial, &mut done),
            FairdivStatus::Ok
        );
        for item in 0..5 {
            let mut owner = -1;
            assert_eq!(
                fairdiv_allocation_owner(done, item, &mut owner),
                FairdivStatus::Ok
            );
            assert!(owner == 0 || owner == 1);
        }
        let mut valid = false;
        let mut propm = ptr::null_mut();
        assert_eq!(
            fairdiv_allocate(inst, FairdivAlgorithm::Propm, &mut propm),
            FairdivStatus::Ok
        );
        assert_eq!(
            fairdiv_check_propm(inst, propm, &mut valid),
            FairdivStatus::Ok
        );
        assert!(valid);
        let mut mms = 0.0;
        assert_eq!(fairdiv_mms_exact(inst, 1, &mut mms), FairdivStatus::Ok);
        assert_eq!(mms, 6.0);
        for a in [partial, done, propm] {
            fairdiv_allocation_free(a);
        }
        fairdiv_instance_free(inst);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut out = ptr::null_mut();
        let bad = [1.0, -2.0];
        assert_eq!(
            fairdiv_instance_new(1, 2, bad.as_ptr(), &mut out),
            FairdivStatus::InvalidInput
        );
        assert!(last_error().contains("negative"), "{}", last_error());
        assert!(out.is_null());

        assert_eq!(
            fairdiv_instance_new(1, 2, ptr::null(), &mut out),
            FairdivStatus::NullPointer
        );
        assert_eq!(
            fairdiv_allocate(ptr::null(), FairdivAlgorithm::Maxsum, &mut ptr::null_mut()),
            FairdivStatus::NullPointer
        );

        let inst = instance(&[&[1.0; 15], &[1.0; 15]]);
        let mut v = 0.0;
        assert_eq!(fairdiv_mms_exact(inst, 0, &mut v), FairdivStatus::TooLarge);
        assert_eq!(fairdiv_mms_exact(inst, 9, &mut v), FairdivStatus::TooLarge);
        let mut u = [0.0; 1];
        let mut alloc = ptr::null_mut();
        assert_eq!(
            fairdiv_allocate(inst, FairdivAlgorithm::Maxsum, &mut alloc),
            FairdivStatus::Ok
        );
        assert_eq!(
            fairdiv_utilities(inst, alloc, u.as_mut_ptr(), 1),
            FairdivStatus::OutOfRange
        );
        assert_eq!(
            fairdiv_allocation_share(alloc, 2, 0, &mut v),
            FairdivStatus::OutOfRange
        );
        fairdiv_allocation_free(alloc);
        fairdiv_instance_free(inst);

        // NULL is a no-op for the destructors.
        fairdiv_instance_free(ptr::null_mut());
        fairdiv_allocation_free(ptr::null_mut());
    }
    let name = unsafe { CStr::from_ptr(fairdiv_status_name(FairdivStatus::TooLarge)) };
    assert_eq!(name.to_str().unwrap(), "too large");
    let version = unsafe { CStr::from_ptr(fairdiv_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
