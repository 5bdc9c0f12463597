import pytest

from pinpoint.world import Item, ItemSet, World, WorldGenConfig, generate_world


def make_item(item_id, subject, **attrs):
    attributes = {"subject": subject, **attrs}
    return Item(id=item_id, subject=subject, attributes=attributes)


def make_world(items, extra_vocab=None):
    """Build a minimal world whose vocab is exactly what the items use."""
    vocab = {}
    for item in items:
        for key, value in item.attributes.items():
            vocab.setdefault(key, [])
            if value not in vocab[key]:
                vocab[key].append(value)
    for key, values in (extra_vocab or {}).items():
        vocab.setdefault(key, [])
        for v in values:
            if v not in vocab[key]:
                vocab[key].append(v)
    subjects = list(dict.fromkeys(item.subject for item in items))
    for s in vocab.get("subject", []):
        if s not in subjects:
            subjects.append(s)
    return World(items=tuple(items), vocab=vocab, subjects=subjects)


@pytest.fixture
def small_world():
    gen = WorldGenConfig(
        n_items=60,
        n_subjects=4,
        attribute_schema={"color": 4, "size": 3, "material": 4},
    )
    return generate_world(gen, seed=11)


def itemset(items, target_index=0, setting=None):
    return ItemSet(items=tuple(items), target_index=target_index, setting=setting)
