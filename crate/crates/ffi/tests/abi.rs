use std::ffi::{CStr, CString};
use std::os::raw::c_int;
use std::ptr;

use consensus_lab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cl_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn builtin(name: &str) -> *mut ClScenario {
    let name = CString::new(name).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { cl_scenario_builtin(name.as_ptr(), &mut s) },
        ClStatus::Ok
    );
    assert!(!s.is_null());
    s
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(cl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn short_run_through_handles() {
    let s = builtin("avoidance_pair");
    unsafe {
        let (mut n, mut order) = (0usize, 0usize);
        assert_eq!(cl_scenario_n_agents(s, &mut n), ClStatus::Ok);
        assert_eq!(cl_scenario_order(s, &mut order), ClStatus::Ok);
        assert_eq!((n, order), (2, 2));
        assert_eq!(cl_scenario_set_duration(s, 0.5), ClStatus::Ok);

        let mut t = ptr::null_mut();
        assert_eq!(cl_run(s, &mut t), ClStatus::Ok);
        let mut len = 0usize;
        assert_eq!(cl_trace_len(t, &mut len), ClStatus::Ok);
        assert_eq!(len, 51);
        let mut aborted: c_int = -1;
        assert_eq!(cl_trace_aborted(t, &mut aborted), ClStatus::Ok);
        assert_eq!(aborted, 0);

        let mut x = f64::NAN;
        assert_eq!(cl_trace_time(t, len - 1, &mut x), ClStatus::Ok);
        assert!((x - 0.5).abs() < 1e-12);
        assert_eq!(cl_trace_agent_state(t, 0, 1, 0, &mut x), ClStatus::Ok);
        assert_eq!(x, -1.4);
        assert_eq!(cl_trace_leader_state(t, 0, 0, &mut x), ClStatus::Ok);
        assert_eq!(x, 0.0);
        assert_eq!(cl_trace_tracking_error(t, 0, 0, 0, &mut x), ClStatus::Ok);
        assert_eq!(x, 1.0);
        assert_eq!(cl_trace_control(t, 3, 0, &mut x), ClStatus::Ok);
        assert!(x.is_finite());

        assert_eq!(cl_trace_time(t, len, &mut x), ClStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        assert_eq!(
            cl_trace_agent_state(t, 0, 2, 0, &mut x),
            ClStatus::OutOfRange
        );

        let mut json = ptr::null_mut();
        assert_eq!(cl_trace_metrics_json(t, &mut json), ClStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        cl_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["min_pair_distance"].as_f64().unwrap() > 0.0);

        let dir = tempfile::tempdir().unwrap();
        let d = CString::new(dir.path().to_str().unwrap()).unwrap();
        assert_eq!(cl_trace_write_outputs(t, d.as_ptr()), ClStatus::Ok);
        assert!(dir.path().join("trace.csv").exists());
        assert!(dir.path().join("fig_controls.csv").exists());

        cl_trace_free(t);
        cl_scenario_free(s);
    }
}

#[test]
fn errors_are_reported_not_thrown() {
    unsafe {
        let mut s = ptr::null_mut();
        let bad = CString::new("{ \"schema\": 1, ").unwrap();
        assert_eq!(cl_scenario_from_json(bad.as_ptr(), &mut s), ClStatus::Parse);
        assert!(s.is_null());
        assert!(last_error().contains("line 1"), "{}", last_error());

        assert_eq!(
            cl_scenario_from_json(ptr::null(), &mut s),
            ClStatus::NullPointer
        );
        let name = CString::new("nope").unwrap();
        assert_eq!(
            cl_scenario_builtin(name.as_ptr(), &mut s),
            ClStatus::OutOfRange
        );

        let missing = CString::new("/nonexistent/scenario.json").unwrap();
        assert_eq!(
            cl_scenario_from_file(missing.as_ptr(), &mut s),
            ClStatus::Io
        );

        let mut v: serde_json::Value =
            serde_json::from_str(consensus_lab::config::bundled::SEC5).unwrap();
        v["gains"]["lambda_roots"] = serde_json::Value::Null;
        v["gains"]["lambda"] = serde_json::json!([-1.0]);
        let text = CString::new(v.to_string()).unwrap();
        assert_eq!(
            cl_scenario_from_json(text.as_ptr(), &mut s),
            ClStatus::Validation
        );
        assert!(last_error().contains("Hurwitz"), "{}", last_error());

        let sc = builtin("obstacle");
        assert_eq!(cl_scenario_set_dt(sc, -1.0), ClStatus::Validation);
        assert_eq!(cl_scenario_set_duration(sc, f64::NAN), ClStatus::Validation);
        cl_scenario_free(sc);

        cl_scenario_free(ptr::null_mut());
        cl_trace_free(ptr::null_mut());
        cl_string_free(ptr::null_mut());
    }
}

#[test]
fn graph_lyapunov_matches_hand_solution() {
    // Path 1 - 2 with only agent 1 pinned: £ = [[2, -1], [-1, 1]], q = [2, 3].
    let a = [0.0, 1.0, 1.0, 0.0];
    let b = [1.0, 0.0];
    let mut q = [0.0; 2];
    let mut min_eig = 0.0;
    let st = unsafe {
        cl_graph_lyapunov(
            2,
            a.as_ptr(),
            b.as_ptr(),
            1.0,
            1.0,
            q.as_mut_ptr(),
            &mut min_eig,
        )
    };
    assert_eq!(st, ClStatus::Ok);
    assert!((q[0] - 2.0).abs() < 1e-12 && (q[1] - 3.0).abs() < 1e-12);
    assert!(min_eig > 0.0);

    let b0 = [0.0, 0.0];
    let st = unsafe {
        cl_graph_lyapunov(
            2,
            a.as_ptr(),
            b0.as_ptr(),
            1.0,
            1.0,
            q.as_mut_ptr(),
            &mut min_eig,
        )
    };
    assert_eq!(st, ClStatus::Numerical);
}

#[test]
fn hurwitz_check() {
    let mut out: c_int = -1;
    let stable = [2.0, 3.0];
    assert_eq!(
        unsafe { cl_check_hurwitz(stable.as_ptr(), 2, &mut out) },
        ClStatus::Ok
    );
    assert_eq!(out, 1);
    let unstable = [-1.0];
    assert_eq!(
        unsafe { cl_check_hurwitz(unstable.as_ptr(), 1, &mut out) },
        ClStatus::Ok
    );
    assert_eq!(out, 0);
}
