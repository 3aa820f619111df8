//! The user guide, chapter by chapter.
//!
//! Each module below includes one markdown chapter of the book under
//! `book/src/`; rustdoc compiles and runs every fenced Rust block in them,
//! so `cargo test --doc` keeps the book in sync with the crate. Render the
//! same sources with `mdbook build book`.

macro_rules! chapter {
    ($name:ident, $path:literal) => {
        #[doc = include_str!($path)]
        pub mod $name {}
    };
}

chapter!(ch1_introduction, "../../../book/src/introduction.md");
chapter!(ch2_profiles, "../../../book/src/profiles.md");
chapter!(ch3_convergence, "../../../book/src/convergence.md");
chapter!(ch4_geometry, "../../../book/src/geometry.md");
chapter!(ch5_curvature, "../../../book/src/curvature.md");
chapter!(ch6_integrability, "../../../book/src/integrability.md");
chapter!(ch7_oracles, "../../../book/src/oracles.md");
chapter!(ch8_cli, "../../../book/src/cli.md");
