import json
from pathlib import Path


def write_config(directory, data, name='config.json'):
    path = Path(directory) / name
    path.write_text(json.dumps(data))
    return str(path)
