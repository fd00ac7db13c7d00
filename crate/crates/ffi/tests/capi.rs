use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use nebulae_ffi::*;

fn parse(text: &str) -> *mut NebulaeTournament {
    let c = CString::new(text).unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(
        unsafe { nebulae_tournament_parse(c.as_ptr(), &mut t) },
        NebulaeStatus::Ok
    );
    t
}

fn last_error() -> String {
    let p = nebulae_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn triangle_round_trip() {
    let text = "tournament matrix 3\n010\n001\n100\n";
    let t = parse(text);
    unsafe {
        assert_eq!(nebulae_tournament_order(t), 3);
        let mut beats = false;
        assert_eq!(
            nebulae_tournament_beats(t, 0, 1, &mut beats),
            NebulaeStatus::Ok
        );
        assert!(beats);
        let mut tr = 0;
        assert_eq!(nebulae_transitive_number(t, &mut tr), NebulaeStatus::Ok);
        assert_eq!(tr, 2);
        let mut s = ptr::null_mut();
        assert_eq!(nebulae_tournament_to_text(t, &mut s), NebulaeStatus::Ok);
        assert_eq!(CStr::from_ptr(s).to_str().unwrap(), text);
        nebulae_string_free(s);
        nebulae_tournament_free(t);
    }
}

#[test]
fn matrix_constructor_and_complement() {
    let m = [0u8, 1, 0, 0, 0, 1, 1, 0, 0];
    let mut t = ptr::null_mut();
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(
            nebulae_tournament_from_matrix(3, m.as_ptr(), &mut t),
            NebulaeStatus::Ok
        );
        assert_eq!(nebulae_tournament_complement(t, &mut c), NebulaeStatus::Ok);
        let mut beats = true;
        nebulae_tournament_beats(c, 0, 1, &mut beats);
        assert!(!beats);
        nebulae_tournament_free(t);
        nebulae_tournament_free(c);
    }
}

#[test]
fn errors_are_codes_with_messages() {
    let c = CString::new("tournament matrix 2\n11\n00\n").unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(
        unsafe { nebulae_tournament_parse(c.as_ptr(), &mut t) },
        NebulaeStatus::Parse
    );
    assert!(t.is_null());
    assert!(last_error().contains("line 2"));

    assert_eq!(
        unsafe { nebulae_tournament_parse(ptr::null(), &mut t) },
        NebulaeStatus::NullPointer
    );
    let bad = [1u8, 1, 1, 1];
    assert_eq!(
        unsafe { nebulae_tournament_from_matrix(2, bad.as_ptr(), &mut t) },
        NebulaeStatus::InvalidInput
    );

    let big = parse(&nebulae::io::write_matrix(
        &nebulae::Tournament::transitive(40),
    ));
    let mut tr = 0;
    assert_eq!(
        unsafe { nebulae_transitive_number(big, &mut tr) },
        NebulaeStatus::BudgetExceeded
    );
    let mut found = false;
    assert_eq!(
        unsafe {
            nebulae_find_ordering(
                big,
                NebulaeOrderingKind::Left,
                0,
                &mut found,
                ptr::null_mut(),
            )
        },
        NebulaeStatus::BudgetExceeded
    );
    unsafe { nebulae_tournament_free(big) };
    unsafe { nebulae_tournament_free(ptr::null_mut()) };
}

#[test]
fn central_example_through_the_interface() {
    let t = parse(
        &std::fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/central_example.txt"),
        )
        .unwrap(),
    );
    let mut prime = false;
    let mut found = false;
    let mut order = [usize::MAX; 12];
    unsafe {
        assert_eq!(nebulae_is_prime(t, &mut prime), NebulaeStatus::Ok);
        assert_eq!(
            nebulae_find_ordering(
                t,
                NebulaeOrderingKind::Central,
                12,
                &mut found,
                order.as_mut_ptr()
            ),
            NebulaeStatus::Ok
        );
    }
    assert!(prime && found);
    let mut sorted = order;
    sorted.sort_unstable();
    assert_eq!(sorted.to_vec(), (0..12).collect::<Vec<_>>());

    let c3 = parse("tournament matrix 3\n010\n001\n100\n");
    let mut map = [0usize; 3];
    unsafe {
        assert_eq!(
            nebulae_contains(t, c3, &mut found, map.as_mut_ptr()),
            NebulaeStatus::Ok
        );
    }
    assert!(found);
    let host = nebulae::examples::central_example();
    let pattern = nebulae::Tournament::cyclic_triangle();
    assert!(nebulae::containment::Embedding { map: map.to_vec() }.validate(&pattern, &host));
    unsafe {
        nebulae_tournament_free(t);
        nebulae_tournament_free(c3);
    }
}

#[test]
fn example_checklist_passes() {
    let mut passed = false;
    assert_eq!(
        unsafe { nebulae_verify_examples(&mut passed) },
        NebulaeStatus::Ok
    );
    assert!(passed);
}

#[test]
fn header_declares_the_interface_and_compiles() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/nebulae.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "nebulae_tournament_parse",
        "nebulae_tournament_free",
        "nebulae_find_ordering",
        "nebulae_contains",
        "nebulae_last_error",
        "NEBULAE_STATUS_BUDGET_EXCEEDED",
        "typedef struct NebulaeTournament NebulaeTournament",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c"])
        .arg(&header)
        .output()
    else {
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
