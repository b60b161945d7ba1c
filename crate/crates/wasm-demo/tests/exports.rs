use serde_json::Value;
use zsz_wasm_demo::*;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn fixture_list_and_layout() {
    let names = parse(&fixture_names_json());
    assert!(names.as_array().unwrap().iter().any(|n| n == "ZSZ144-3"));
    let layout = parse(&code_layout_json("ZSZ144-3").unwrap());
    assert_eq!(layout["summary"]["n"], 144);
    let (ell, m) = (layout["ell"].as_u64().unwrap(), layout["m"].as_u64().unwrap());
    assert_eq!(2 * ell * m, 144);
    let checks = layout["x_checks"].as_array().unwrap();
    assert_eq!(checks.len(), 72);
    assert!(checks.iter().all(|c| c.as_array().unwrap().len() == 6));
    assert!(code_layout_json("NOPE").is_err());
}

#[test]
fn route_frames_follow_the_script() {
    let step = parse(&route_step_json("ZSZ80", "X", 0).unwrap());
    let frames = step["frames"].as_array().unwrap();
    let lines = step["lines"].as_array().unwrap();
    assert_eq!(frames.len(), lines.len() + 1);
    let (w, h) = (step["width"].as_u64().unwrap(), step["height"].as_u64().unwrap());
    // Atoms start and end inside the core, in distinct sites.
    for frame in [&frames[0], frames.last().unwrap()] {
        let mut sites: Vec<(u64, u64)> = frame
            .as_array()
            .unwrap()
            .iter()
            .map(|p| (p[0].as_u64().unwrap(), p[1].as_u64().unwrap()))
            .collect();
        assert!(sites.iter().all(|&(x, y)| x < w && y < h));
        sites.sort_unstable();
        sites.dedup();
        assert_eq!(sites.len() as u64, w * h);
    }
    assert!(route_step_json("ZSZ80", "X", 99).is_err());
    assert!(route_step_json("ZSZ80", "Q", 0).is_err());
}

#[test]
fn twisted_balls_outgrow_abelian_ones() {
    let v = parse(&ball_growth_json(31, 5, 2, 8).unwrap());
    let t = v["twisted"]["sizes"].as_array().unwrap();
    let a = v["abelian"]["sizes"].as_array().unwrap();
    assert_eq!(t[0], 1);
    assert!(t[8].as_u64().unwrap() > a[8].as_u64().unwrap());
}
