use graphette::store::{file_len, HEADER_LEN, MAGIC};
use graphette::{deserialize, serialize, Error, FormatError, GraphetteTable};

#[test]
fn save_and_load() {
    let dir = tempfile::tempdir().unwrap();
    for k in 1..=6 {
        let t = GraphetteTable::build(k, 1, 1).unwrap();
        let path = dir.path().join(format!("k{k}.bin"));
        t.save(&path).unwrap();
        assert_eq!(
            std::fs::metadata(&path).unwrap().len(),
            file_len(k, t.canonical_count())
        );
        let back = GraphetteTable::load(&path).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_bytes(), std::fs::read(&path).unwrap());
    }
}

#[test]
fn streaming_matches_bytes() {
    let t = GraphetteTable::build(4, 1, 1).unwrap();
    let (cat, tab, orb) = t.clone().into_parts();
    let mut buf = Vec::new();
    serialize(&cat, &tab, &orb, &mut buf).unwrap();
    assert_eq!(buf, t.to_bytes());
    let (c2, t2, o2) = deserialize(buf.as_slice()).unwrap();
    assert_eq!((c2, t2, o2), (cat, tab, orb));
}

#[test]
fn header_fields() {
    let bytes = GraphetteTable::build(5, 1, 1).unwrap().to_bytes();
    assert_eq!(&bytes[..10], MAGIC);
    assert_eq!(bytes[10], 1);
    assert_eq!(bytes[11], 5);
    assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 34);
    assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 90);
    let records = u64::from_le_bytes(bytes[HEADER_LEN as usize - 8..HEADER_LEN as usize].try_into().unwrap());
    assert_eq!(records, 1024);
}

#[test]
fn every_single_byte_flip_is_detected() {
    let bytes = GraphetteTable::build(3, 1, 1).unwrap().to_bytes();
    for i in 0..bytes.len() {
        let mut bad = bytes.clone();
        bad[i] ^= 0x10;
        assert!(GraphetteTable::from_bytes(&bad).is_err(), "flip at {i} accepted");
    }
}

#[test]
fn truncation_and_padding() {
    let bytes = GraphetteTable::build(4, 1, 1).unwrap().to_bytes();
    for cut in [0, 5, HEADER_LEN as usize, bytes.len() - 1] {
        let err = GraphetteTable::from_bytes(&bytes[..cut]).unwrap_err();
        assert!(matches!(err, Error::Format(_)), "cut {cut}: {err}");
    }
    let mut long = bytes.clone();
    long.extend_from_slice(&[0; 8]);
    assert!(GraphetteTable::from_bytes(&long).is_err());
}

#[test]
fn bad_magic_names_both_values() {
    let mut bytes = GraphetteTable::build(2, 1, 1).unwrap().to_bytes();
    bytes[0] = b'X';
    match GraphetteTable::from_bytes(&bytes) {
        Err(Error::Format(FormatError::BadMagic { .. })) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_file_is_io() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        GraphetteTable::load(dir.path().join("absent.bin")),
        Err(Error::Io(_))
    ));
}
