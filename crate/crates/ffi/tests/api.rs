use std::ffi::{CStr, CString};
use std::ptr;

use xreplay_ffi::*;

fn last_error() -> String {
    let p = xr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn sum_tree_roundtrip_and_errors() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(xr_sumtree_new(3, &mut t), XrStatus::Ok);
        for (i, v) in [1.0, 2.0, 3.0].iter().enumerate() {
            assert_eq!(xr_sumtree_set(t, i, *v), XrStatus::Ok);
        }
        let mut total = 0.0;
        assert_eq!(xr_sumtree_total(t, &mut total), XrStatus::Ok);
        assert_eq!(total, 6.0);
        let mut leaf = 0;
        assert_eq!(xr_sumtree_sample(t, 2.5, &mut leaf), XrStatus::Ok);
        assert_eq!(leaf, 1);
        let mut v = 0.0;
        assert_eq!(xr_sumtree_get(t, 2, &mut v), XrStatus::Ok);
        assert_eq!(v, 3.0);
        assert_eq!(xr_sumtree_set(t, 1, -1.0), XrStatus::Domain);
        assert!(!last_error().is_empty());
        assert_eq!(xr_sumtree_total(t, ptr::null_mut()), XrStatus::NullPointer);
        assert!(last_error().contains("out"));
        xr_sumtree_free(t);
        assert_eq!(xr_sumtree_new(0, &mut t), XrStatus::Config);
        assert_eq!(xr_sumtree_set(ptr::null_mut(), 0, 1.0), XrStatus::NullPointer);
    }
}

#[test]
fn env_handles() {
    unsafe {
        let name = CString::new("pendulum").unwrap();
        let mut env = ptr::null_mut();
        assert_eq!(xr_env_new(name.as_ptr(), 3, &mut env), XrStatus::Ok);
        let (mut od, mut ad, mut disc) = (0, 0, true);
        assert_eq!(xr_env_dims(env, &mut od, &mut ad, &mut disc), XrStatus::Ok);
        assert_eq!((od, ad, disc), (3, 1, false));
        let mut obs = [0.0; 3];
        assert_eq!(xr_env_reset(env, obs.as_mut_ptr(), 3), XrStatus::Ok);
        let mut short = [0.0; 2];
        assert_eq!(xr_env_reset(env, short.as_mut_ptr(), 2), XrStatus::Shape);
        let (mut r, mut d, mut tr) = (0.0, true, true);
        let a = [0.5];
        assert_eq!(
            xr_env_step_continuous(env, a.as_ptr(), 1, obs.as_mut_ptr(), 3, &mut r, &mut d, &mut tr),
            XrStatus::Ok
        );
        assert!(r <= 0.0 && !d && !tr);
        assert_eq!(
            xr_env_step_discrete(env, 1, obs.as_mut_ptr(), 3, &mut r, &mut d, &mut tr),
            XrStatus::Domain
        );
        xr_env_free(env);
        let bad = CString::new("acrobot").unwrap();
        assert_eq!(xr_env_new(bad.as_ptr(), 0, &mut env), XrStatus::Config);
    }
}

#[test]
fn replay_push_sample_update() {
    unsafe {
        let per = xr_per_config_default();
        let mut rp = ptr::null_mut();
        assert_eq!(xr_replay_new(8, false, &per, 0, &mut rp), XrStatus::Ok);
        let mut idx = [0usize; 4];
        let mut w = [0.0; 4];
        assert_eq!(xr_replay_sample(rp, 4, idx.as_mut_ptr(), w.as_mut_ptr()), XrStatus::NotReady);
        for i in 0..10 {
            let s = [i as f64, 0.0];
            let n = [i as f64 + 1.0, 0.0];
            let a = [0.1];
            let mut slot = 0;
            assert_eq!(
                xr_replay_push_continuous(rp, s.as_ptr(), n.as_ptr(), 2, a.as_ptr(), 1, -1.0, false, &mut slot),
                XrStatus::Ok
            );
            assert_eq!(slot, i % 8);
        }
        let mut len = 0;
        assert_eq!(xr_replay_len(rp, &mut len), XrStatus::Ok);
        assert_eq!(len, 8);
        let s = [0.0, 0.0, 0.0];
        assert_eq!(
            xr_replay_push_discrete(rp, s.as_ptr(), s.as_ptr(), 3, 0, 0.0, false, ptr::null_mut()),
            XrStatus::Shape
        );
        assert_eq!(xr_replay_sample(rp, 4, idx.as_mut_ptr(), w.as_mut_ptr()), XrStatus::Ok);
        assert!(idx.iter().all(|&i| i < 8));
        assert!(w.iter().all(|&x| x > 0.0 && x <= 1.0));
        let td = [0.0, 5.0, 0.0, 0.0];
        assert_eq!(xr_replay_update_priorities(rp, idx.as_ptr(), td.as_ptr(), 4), XrStatus::Ok);
        let mut state = [0.0; 2];
        let (mut r, mut d) = (0.0, true);
        assert_eq!(xr_replay_get(rp, 0, state.as_mut_ptr(), ptr::null_mut(), 2, &mut r, &mut d), XrStatus::Ok);
        assert_eq!((state, r, d), ([8.0, 0.0], -1.0, false));
        assert_eq!(xr_replay_get(rp, 9, ptr::null_mut(), ptr::null_mut(), 2, &mut r, &mut d), XrStatus::Bounds);
        xr_replay_free(rp);
    }
}

#[test]
fn train_then_eval_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "env=cartpole\nepisodes=4\neval_interval=2\neval_episodes=2\ndqn.warmup=20\ndqn.hidden=8\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let c_cfg = CString::new(cfg.to_str().unwrap()).unwrap();
    let c_out = CString::new(out.to_str().unwrap()).unwrap();
    let mut converged = 0i64;
    unsafe {
        assert_eq!(xr_train(c_cfg.as_ptr(), c_out.as_ptr(), &mut converged), XrStatus::Ok);
    }
    assert_eq!(converged, -1);
    let csv = std::fs::read_to_string(out.join("log.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let ckpt = CString::new(out.join("checkpoint.txt").to_str().unwrap()).unwrap();
    let (mut mean, mut std) = (0.0, 0.0);
    unsafe {
        assert_eq!(xr_eval_checkpoint(ckpt.as_ptr(), 3, 1, &mut mean, &mut std), XrStatus::Ok);
    }
    assert!((1.0..=200.0).contains(&mean));
    let missing = CString::new(dir.path().join("nope.cfg").to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(xr_train(missing.as_ptr(), c_out.as_ptr(), ptr::null_mut()), XrStatus::Io);
        assert_eq!(xr_train(ptr::null(), c_out.as_ptr(), ptr::null_mut()), XrStatus::NullPointer);
    }
}

#[test]
fn version_is_nonempty() {
    let v = unsafe { CStr::from_ptr(xr_version()) };
    assert!(!v.to_bytes().is_empty());
}
