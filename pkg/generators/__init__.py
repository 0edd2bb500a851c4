from generators import dks_embedding, qbf, snsat

GENERATORS = {
    "snsat": snsat,
    "qbf": qbf,
    "dks-embed": dks_embedding,
}


def get_generator(kind):
    """Get the generator module registered under ``kind``"""
    if kind not in GENERATORS:
        raise ValueError(f"No generator available for: {kind}")
    return GENERATORS[kind]
