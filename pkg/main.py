from cuntzendo.server import app
