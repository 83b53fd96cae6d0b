//! Holds only the `acceptance` test target; run it with `cargo test -p spectral-zeros-acceptance`.
