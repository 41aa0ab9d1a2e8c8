//! Integer-keyed maps serialized as JSON objects with decimal string keys,
//! emitted in numeric key order so that output is canonical.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::marker::PhantomData;
use std::str::FromStr;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn serialize<K, V, S>(map: &BTreeMap<K, V>, serializer: S) -> Result<S::Ok, S::Error>
where
    K: Display,
    V: Serialize,
    S: Serializer,
{
    let mut m = serializer.serialize_map(Some(map.len()))?;
    for (k, v) in map {
        m.serialize_entry(&k.to_string(), v)?;
    }
    m.end()
}

pub fn deserialize<'de, K, V, D>(deserializer: D) -> Result<BTreeMap<K, V>, D::Error>
where
    K: FromStr + Ord,
    V: Deserialize<'de>,
    D: Deserializer<'de>,
{
    struct IntKeyed<K, V>(PhantomData<(K, V)>);

    impl<'de, K: FromStr + Ord, V: Deserialize<'de>> Visitor<'de> for IntKeyed<K, V> {
        type Value = BTreeMap<K, V>;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("an object keyed by integer strings")
        }

        fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
            let mut out = BTreeMap::new();
            while let Some((k, v)) = access.next_entry::<String, V>()? {
                let key = k
                    .trim()
                    .parse::<K>()
                    .map_err(|_| serde::de::Error::custom(format!("bad integer key {k:?}")))?;
                if out.insert(key, v).is_some() {
                    return Err(serde::de::Error::custom(format!("duplicate key {k:?}")));
                }
            }
            Ok(out)
        }
    }

    deserializer.deserialize_map(IntKeyed(PhantomData))
}
