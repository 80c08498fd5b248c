//! C interface to xreplay.
//!
//! Every function returns an [`XrStatus`]; on failure a description is kept
//! per thread and can be read with [`xr_last_error_message`]. Objects are
//! opaque handles created by `*_new` and released by the matching `*_free`.
//! Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use xreplay::envs::{EnvKind, Environment};
use xreplay::harness::{build_run, evaluate, load_checkpoint, train, write_run, RunConfig};
use xreplay::prioritized::{PerConfig, SumTree};
use xreplay::replay::{Action, ReplayStack, Transition};
use xreplay::rng::{stream, Rng, Stream};
use xreplay::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Shape = 4,
    NotReady = 5,
    Domain = 6,
    Bounds = 7,
    Numerical = 8,
    Integrity = 9,
    UnsupportedGoal = 10,
    Io = 11,
    Parse = 12,
    Panic = 13,
}

impl From<&Error> for XrStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Config(_) => XrStatus::Config,
            Error::Shape { .. } => XrStatus::Shape,
            Error::NotReady(_) => XrStatus::NotReady,
            Error::Domain(_) => XrStatus::Domain,
            Error::Bounds { .. } => XrStatus::Bounds,
            Error::Numerical(_) => XrStatus::Numerical,
            Error::Integrity(_) => XrStatus::Integrity,
            Error::UnsupportedGoal(_) => XrStatus::UnsupportedGoal,
            Error::Io(_) => XrStatus::Io,
            Error::Parse(_) => XrStatus::Parse,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(XrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(XrStatus::from(&e), e.to_string())
    }
}

type FfiResult = std::result::Result<(), Failure>;

fn null(what: &str) -> Failure {
    Failure(XrStatus::NullPointer, format!("`{what}` is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(XrStatus::InvalidArgument, msg.into())
}

/// Runs `f`, recording any error or panic for [`xr_last_error_message`].
fn guard(f: impl FnOnce() -> FfiResult) -> XrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => XrStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            XrStatus::Panic
        }
    }
}

unsafe fn handle<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> FfiResult {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("`{what}` is not valid UTF-8")))
}

/// Message for the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn xr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- sum tree -------------------------------------------------------------

/// Sum tree over non-negative leaf values.
pub struct XrSumTree(SumTree);

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xr_sumtree_new(capacity: usize, out: *mut *mut XrSumTree) -> XrStatus {
    guard(|| {
        let tree = SumTree::new(capacity)?;
        write(out, Box::into_raw(Box::new(XrSumTree(tree))), "out")
    })
}

/// # Safety
/// `tree` must come from [`xr_sumtree_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xr_sumtree_free(tree: *mut XrSumTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// # Safety
/// `tree` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn xr_sumtree_set(tree: *mut XrSumTree, index: usize, value: f64) -> XrStatus {
    guard(|| Ok(handle(tree, "tree")?.0.set(index, value)?))
}

/// # Safety
/// `tree` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn xr_sumtree_get(tree: *mut XrSumTree, index: usize, out: *mut f64) -> XrStatus {
    guard(|| {
        let v = handle(tree, "tree")?.0.leaf(index)?;
        write(out, v, "out")
    })
}

/// # Safety
/// `tree` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn xr_sumtree_total(tree: *mut XrSumTree, out: *mut f64) -> XrStatus {
    guard(|| {
        let v = handle(tree, "tree")?.0.total();
        write(out, v, "out")
    })
}

/// Leaf whose cumulative mass interval contains `u`, for `u` in
/// `[0, total)`.
///
/// # Safety
/// `tree` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn xr_sumtree_sample(tree: *mut XrSumTree, u: f64, out: *mut usize) -> XrStatus {
    guard(|| {
        let leaf = handle(tree, "tree")?.0.sample(u)?;
        write(out, leaf, "out")
    })
}

// ---- environments ---------------------------------------------------------

/// An environment instance with its own seeded reset stream.
pub struct XrEnv {
    env: Box<dyn Environment>,
    rng: Rng,
}

/// `name` is `cartpole`, `mountaincar` or `pendulum`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn xr_env_new(name: *const c_char, seed: u64, out: *mut *mut XrEnv) -> XrStatus {
    guard(|| {
        let kind: EnvKind = string(name, "name")?.parse()?;
        let env = XrEnv { env: kind.make(), rng: stream(seed, Stream::Env) };
        write(out, Box::into_raw(Box::new(env)), "out")
    })
}

/// # Safety
/// `env` must come from [`xr_env_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xr_env_free(env: *mut XrEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Observation length, and the number of discrete actions or the action
/// vector length for continuous control.
///
/// # Safety
/// `env` must be a live handle; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_env_dims(
    env: *mut XrEnv,
    obs_dim: *mut usize,
    action_dim: *mut usize,
    discrete: *mut bool,
) -> XrStatus {
    guard(|| {
        let spec = handle(env, "env")?.env.spec();
        let (n, is_discrete) = match spec.action_space {
            xreplay::envs::ActionSpace::Discrete(n) => (n, true),
            xreplay::envs::ActionSpace::Continuous { dim, .. } => (dim, false),
        };
        write(obs_dim, spec.obs_dim, "obs_dim")?;
        write(action_dim, n, "action_dim")?;
        write(discrete, is_discrete, "discrete")
    })
}

/// # Safety
/// `env` must be a live handle; `obs` must hold `obs_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn xr_env_reset(env: *mut XrEnv, obs: *mut f64, obs_len: usize) -> XrStatus {
    guard(|| {
        let e = handle(env, "env")?;
        let state = e.env.reset(&mut e.rng);
        copy_out(&state, obs, obs_len)
    })
}

unsafe fn copy_out(values: &[f64], p: *mut f64, len: usize) -> FfiResult {
    if len != values.len() {
        return Err(Failure(XrStatus::Shape, format!("buffer holds {len} values, need {}", values.len())));
    }
    output(p, len, "buffer")?.copy_from_slice(values);
    Ok(())
}

unsafe fn step(
    env: *mut XrEnv,
    action: Action,
    obs: *mut f64,
    obs_len: usize,
    reward: *mut f64,
    done: *mut bool,
    truncated: *mut bool,
) -> FfiResult {
    let r = handle(env, "env")?.env.step(&action)?;
    copy_out(&r.next_state, obs, obs_len)?;
    write(reward, r.reward, "reward")?;
    write(done, r.done, "done")?;
    write(truncated, r.truncated, "truncated")
}

/// # Safety
/// `env` must be a live handle; `obs` holds `obs_len` doubles; the other
/// outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_env_step_discrete(
    env: *mut XrEnv,
    action: usize,
    obs: *mut f64,
    obs_len: usize,
    reward: *mut f64,
    done: *mut bool,
    truncated: *mut bool,
) -> XrStatus {
    guard(|| step(env, Action::Discrete(action), obs, obs_len, reward, done, truncated))
}

/// # Safety
/// As [`xr_env_step_discrete`]; `action` holds `action_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn xr_env_step_continuous(
    env: *mut XrEnv,
    action: *const f64,
    action_len: usize,
    obs: *mut f64,
    obs_len: usize,
    reward: *mut f64,
    done: *mut bool,
    truncated: *mut bool,
) -> XrStatus {
    guard(|| {
        let a = input(action, action_len, "action")?.to_vec();
        step(env, Action::Continuous(a), obs, obs_len, reward, done, truncated)
    })
}

// ---- replay ---------------------------------------------------------------

/// Replay buffer with optional prioritized sampling and combined replay.
pub struct XrReplay {
    stack: ReplayStack,
    rng: Rng,
}

/// Prioritized-replay settings; pass null to [`xr_replay_new`] for uniform
/// sampling.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct XrPerConfig {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub max_priority_init: f64,
}

/// Default prioritized-replay settings.
#[no_mangle]
pub extern "C" fn xr_per_config_default() -> XrPerConfig {
    let d = PerConfig::default();
    XrPerConfig { alpha: d.alpha, beta: d.beta, epsilon: d.epsilon, max_priority_init: d.max_priority_init }
}

/// # Safety
/// `per` is null or valid; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xr_replay_new(
    capacity: usize,
    combined: bool,
    per: *const XrPerConfig,
    seed: u64,
    out: *mut *mut XrReplay,
) -> XrStatus {
    guard(|| {
        let per = per.as_ref().map(|p| PerConfig {
            alpha: p.alpha,
            beta: p.beta,
            epsilon: p.epsilon,
            max_priority_init: p.max_priority_init,
        });
        if let Some(p) = &per {
            p.validate()?;
        }
        let replay = XrReplay { stack: ReplayStack::new(capacity, combined, per)?, rng: stream(seed, Stream::Sample) };
        write(out, Box::into_raw(Box::new(replay)), "out")
    })
}

/// # Safety
/// `replay` must come from [`xr_replay_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xr_replay_free(replay: *mut XrReplay) {
    if !replay.is_null() {
        drop(Box::from_raw(replay));
    }
}

/// # Safety
/// `replay` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn xr_replay_len(replay: *mut XrReplay, out: *mut usize) -> XrStatus {
    guard(|| {
        let n = handle(replay, "replay")?.stack.len();
        write(out, n, "out")
    })
}

#[allow(clippy::too_many_arguments)]
unsafe fn push(
    replay: *mut XrReplay,
    state: *const f64,
    next_state: *const f64,
    state_dim: usize,
    action: Action,
    reward: f64,
    done: bool,
    index: *mut usize,
) -> FfiResult {
    let r = handle(replay, "replay")?;
    let t = Transition::new(
        input(state, state_dim, "state")?.to_vec(),
        action,
        reward,
        input(next_state, state_dim, "next_state")?.to_vec(),
        done,
    );
    let i = r.stack.push(t)?;
    if !index.is_null() {
        index.write(i);
    }
    Ok(())
}

/// Stores a transition with a discrete action. `index` (may be null)
/// receives its slot.
///
/// # Safety
/// `state` and `next_state` hold `state_dim` doubles each.
#[no_mangle]
pub unsafe extern "C" fn xr_replay_push_discrete(
    replay: *mut XrReplay,
    state: *const f64,
    next_state: *const f64,
    state_dim: usize,
    action: usize,
    reward: f64,
    done: bool,
    index: *mut usize,
) -> XrStatus {
    guard(|| push(replay, state, next_state, state_dim, Action::Discrete(action), reward, done, index))
}

/// Stores a transition with a continuous action.
///
/// # Safety
/// As [`xr_replay_push_discrete`]; `action` holds `action_dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn xr_replay_push_continuous(
    replay: *mut XrReplay,
    state: *const f64,
    next_state: *const f64,
    state_dim: usize,
    action: *const f64,
    action_dim: usize,
    reward: f64,
    done: bool,
    index: *mut usize,
) -> XrStatus {
    guard(|| {
        let a = Action::Continuous(input(action, action_dim, "action")?.to_vec());
        push(replay, state, next_state, state_dim, a, reward, done, index)
    })
}

/// Draws `batch` slots and their importance weights.
///
/// # Safety
/// `indices` and `weights` hold `batch` elements each.
#[no_mangle]
pub unsafe extern "C" fn xr_replay_sample(
    replay: *mut XrReplay,
    batch: usize,
    indices: *mut usize,
    weights: *mut f64,
) -> XrStatus {
    guard(|| {
        let r = handle(replay, "replay")?;
        let idx = output(indices, batch, "indices")?;
        let w = output(weights, batch, "weights")?;
        let samples = r.stack.sample(batch, &mut r.rng)?;
        for (k, s) in samples.iter().enumerate() {
            idx[k] = s.index;
            w[k] = s.weight;
        }
        Ok(())
    })
}

/// Reads back a stored transition's reward and termination flag, and its
/// states when `state`/`next_state` are non-null.
///
/// # Safety
/// Non-null state buffers hold `state_dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn xr_replay_get(
    replay: *mut XrReplay,
    index: usize,
    state: *mut f64,
    next_state: *mut f64,
    state_dim: usize,
    reward: *mut f64,
    done: *mut bool,
) -> XrStatus {
    guard(|| {
        let r = handle(replay, "replay")?;
        let len = r.stack.len();
        let t = r.stack.buffer().get(index).ok_or(Error::Bounds { index, len })?;
        if !state.is_null() {
            copy_out(&t.state, state, state_dim)?;
        }
        if !next_state.is_null() {
            copy_out(&t.next_state, next_state, state_dim)?;
        }
        write(reward, t.reward, "reward")?;
        write(done, t.done, "done")
    })
}

/// Refreshes priorities from TD errors; a no-op without prioritized replay.
///
/// # Safety
/// `indices` and `td_errors` hold `n` elements each.
#[no_mangle]
pub unsafe extern "C" fn xr_replay_update_priorities(
    replay: *mut XrReplay,
    indices: *const usize,
    td_errors: *const f64,
    n: usize,
) -> XrStatus {
    guard(|| {
        let r = handle(replay, "replay")?;
        let idx = input(indices, n, "indices")?;
        let td = input(td_errors, n, "td_errors")?;
        Ok(r.stack.update_priorities(idx, td)?)
    })
}

// ---- harness --------------------------------------------------------------

/// Trains from a `key=value` config file and writes `log.csv`,
/// `manifest.txt` and `checkpoint.txt` into `out_dir`. `converged_at`
/// (may be null) receives the convergence episode, or -1.
///
/// # Safety
/// Paths must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn xr_train(config_path: *const c_char, out_dir: *const c_char, converged_at: *mut i64) -> XrStatus {
    guard(|| {
        let text = std::fs::read_to_string(string(config_path, "config_path")?)
            .map_err(|e| Failure(XrStatus::Io, e.to_string()))?;
        let cfg = RunConfig::from_text(&text)?;
        let outcome = train(build_run(cfg.clone())?)?;
        write_run(Path::new(string(out_dir, "out_dir")?), &cfg, &outcome)?;
        if !converged_at.is_null() {
            converged_at.write(outcome.converged_at.map_or(-1, |e| e as i64));
        }
        Ok(())
    })
}

/// Mean and standard deviation of `episodes` exploration-free returns of a
/// saved policy.
///
/// # Safety
/// `checkpoint_path` must be a NUL-terminated string; outputs valid.
#[no_mangle]
pub unsafe extern "C" fn xr_eval_checkpoint(
    checkpoint_path: *const c_char,
    episodes: usize,
    seed: u64,
    mean: *mut f64,
    std: *mut f64,
) -> XrStatus {
    guard(|| {
        let policy = load_checkpoint(Path::new(string(checkpoint_path, "checkpoint_path")?))?;
        if episodes == 0 {
            return Err(invalid("episodes must be positive"));
        }
        let stats = evaluate(&policy, episodes, &mut stream(seed, Stream::Eval), 1)?;
        write(mean, stats.mean, "mean")?;
        write(std, stats.std, "std")
    })
}
