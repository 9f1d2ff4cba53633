use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("manifest dir"));
    let header = crate_dir.join("include").join("ptqh.h");

    let mut config = cbindgen::Config::default();
    config.language = cbindgen::Language::C;
    config.header = Some(
        "/* C interface to the ptqh library. All handles are opaque; every\n \
         * function returns a PtqhStatus and reports details through\n \
         * ptqh_last_error_message(). */"
            .into(),
    );
    config.include_guard = Some("PTQH_H".into());
    config.cpp_compat = true;
    config.documentation = true;

    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(&header);
        }
        Err(cbindgen::Error::ParseSyntaxError { .. }) => {
            // In-progress source; the next build regenerates the header.
        }
        Err(e) => panic!("header generation failed: {e}"),
    }

    println!("cargo:rerun-if-changed=src/lib.rs");
}
