use std::fs;
use std::process::Command;

fn braille() -> Command {
    Command::new(env!("CARGO_BIN_EXE_braille"))
}

#[test]
fn synth_then_convert_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("in.txt");
    fs::write(&text, "the cat sat with the dog, and 42 birds.\n").unwrap();
    let img = dir.path().join("page.pgm");
    let st = braille().args(["synth"]).arg(&text).arg("-o").arg(&img).status().unwrap();
    assert!(st.success());
    assert!(dir.path().join("page.txt").exists());
    assert!(dir.path().join("page.bits").exists());

    let out = dir.path().join("out.txt");
    let bits = dir.path().join("out.bits");
    let layout = dir.path().join("out.layout");
    let st = braille()
        .arg("convert")
        .arg(&img)
        .args(["--lang", "en", "--grade", "2", "-o"])
        .arg(&out)
        .arg(format!("--dump-bits={}", bits.display()))
        .arg(format!("--dump-layout={}", layout.display()))
        .status()
        .unwrap();
    assert!(st.success());
    assert_eq!(fs::read_to_string(&out).unwrap(), "the cat sat with the dog, and 42 birds.\n");
    assert_eq!(fs::read_to_string(&bits).unwrap(), fs::read_to_string(dir.path().join("page.bits")).unwrap());
    assert!(fs::read_to_string(&layout).unwrap().starts_with("band 0 "));
}

#[test]
fn convert_speaks_through_the_command() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("p.pgm");
    let text = dir.path().join("t.txt");
    fs::write(&text, "hello\n").unwrap();
    assert!(braille().arg("synth").arg(&text).arg("-o").arg(&img).status().unwrap().success());

    let spoken = dir.path().join("spoken.txt");
    let out = braille()
        .arg("convert")
        .arg(&img)
        .arg("--speak-cmd")
        .arg(format!("cat > {}", spoken.display()))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "hello\n");
    assert_eq!(fs::read_to_string(&spoken).unwrap(), "hello\n");

    let spoken = dir.path().join("spoken2.txt");
    let st = braille()
        .arg("convert")
        .arg(&img)
        .arg("--speak-cmd")
        .arg(format!("cp {{file}} {} && echo {{lang}} >> {}", spoken.display(), spoken.display()))
        .output()
        .unwrap();
    assert!(st.status.success());
    assert_eq!(fs::read_to_string(&spoken).unwrap(), "hello\nen\n");
}

#[test]
fn hindi_page_converts() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("in.txt");
    fs::write(&text, "भारत में हिंदी\n").unwrap();
    let img = dir.path().join("page.pgm");
    assert!(braille().args(["synth", "--lang", "hi"]).arg(&text).arg("-o").arg(&img).status().unwrap().success());
    let out = braille().arg("convert").arg(&img).args(["--lang", "hi"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "भारत में हिंदी\n");
}

#[test]
fn errors_name_the_problem() {
    let out = braille().args(["convert", "/nonexistent/page.pgm"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/page.pgm"));

    let dir = tempfile::tempdir().unwrap();
    let blank = dir.path().join("blank.pgm");
    fs::write(&blank, b"P5\n64 64\n255\n".iter().copied().chain(std::iter::repeat(200).take(64 * 64)).collect::<Vec<u8>>()).unwrap();
    let out = braille().arg("convert").arg(&blank).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("stage"), "{err}");

    let out = braille().args(["convert", "x.pgm", "--order", "CS,XX"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn ablate_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("in.txt");
    fs::write(&text, "a small page of text\n").unwrap();
    let img = dir.path().join("p1.pgm");
    assert!(braille().arg("synth").arg(&text).arg("-o").arg(&img).status().unwrap().success());
    fs::remove_file(dir.path().join("p1.bits")).unwrap();
    let tsv = dir.path().join("t.tsv");
    let out = braille()
        .args(["ablate", "--orders", "CS,IS,MO;none", "--dir"])
        .arg(dir.path())
        .arg("--tsv")
        .arg(&tsv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].contains("CS,IS,MO") && lines[0].contains("none"));
    assert!(lines[1].starts_with("p1") && lines[1].contains("100.0"));
    assert_eq!(fs::read_to_string(&tsv).unwrap().lines().count(), 3);
}
