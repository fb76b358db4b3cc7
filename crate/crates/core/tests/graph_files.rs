use orthohom::graph::io::{parse_graph, read_graph, to_json, to_text, write_graph};
use orthohom::graph::{complete, crown, cycle, subdivision};
use orthohom::Error;

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("orthohom-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn text_and_json_round_trip_through_files() {
    for g in [complete(4).unwrap(), crown(5).unwrap(), subdivision(&cycle(4).unwrap())] {
        for ext in ["txt", "json"] {
            let path = scratch(&format!("g{}.{ext}", g.edge_count()));
            write_graph(&g, &path).unwrap();
            assert_eq!(read_graph(&path).unwrap(), g);
        }
        assert_eq!(parse_graph(&to_text(&g)).unwrap(), g);
        assert_eq!(parse_graph(&to_json(&g)).unwrap(), g);
    }
}

#[test]
fn triangle_text_file() {
    let g = parse_graph("3 3\n0 1\n1 2\n0 2").unwrap();
    assert_eq!(g, complete(3).unwrap());
}

#[test]
fn errors_carry_line_numbers() {
    match parse_graph("3 2\n0 1\n0 0\n") {
        Err(Error::Parse { line, msg }) => {
            assert_eq!(line, 3);
            assert!(msg.contains("self-loop"));
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(read_graph(scratch("missing.txt")), Err(Error::Io(_))));
}
