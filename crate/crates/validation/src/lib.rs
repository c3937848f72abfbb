//! Acceptance checks for `relcoulomb` live in `tests/acceptance.rs`; run
//! them with `cargo test -p relcoulomb-validation --test acceptance`.
