use polyhahn_py::api;

#[test]
fn hexagon_through_the_binding_layer() {
    let s = api::spec(2, 3, &[2, 2, 2]).unwrap();
    assert_eq!(api::size(&s), 7);
    assert_eq!(api::points(&s).len(), 7);
    assert_eq!(api::indices(&s).len(), 7);
    assert_eq!(api::hahn(&s, &[0, 0], &[1, 1]).unwrap(), "1");
    let (passed, json) = api::verify("spectra", &s, 4).unwrap();
    assert!(passed && json.contains("\"schema\":\"polyhahn/1\""));
}

#[test]
fn errors_surface() {
    assert!(api::spec(2, 6, &[3, 5, 2]).unwrap_err().to_string().contains("(1,3)"));
    let s = api::spec(2, 3, &[2, 2, 2]).unwrap();
    assert!(api::weight(&s, &[3, 3]).is_err());
    assert!(api::verify("bogus", &s, 4).is_err());
    assert!(api::limit_scan("bogus").is_err());
}

#[test]
fn reference_heights() {
    let s = api::spec(2, 9, &[7, 6, 7]).unwrap();
    let (v, h) = api::heights(&s).unwrap();
    let (mut vs, mut hs) = (v.clone(), h.clone());
    vs.sort_unstable();
    hs.sort_unstable();
    assert_eq!(vs, hs);
    assert_eq!(v, [5, 6, 7, 7, 6, 5, 4, 3]);
}
