from fractions import Fraction

import yaml

from util.project_paths import DISC_YML

TOOLKIT_VERSION = '1.0.0'
SCENE_FORMATS = ('yml', 'json')


def read_yml_file(file):
    with file.open(mode='r') as file:
        return yaml.load(file, Loader=yaml.FullLoader)


class DiscSettings:

    def __init__(self, config_yml):
        obj = read_yml_file(config_yml)
        self.settings = obj['settings']
        self.env_settings = obj['settings']['env']
        self.verbose = self.settings['verbose']
        self.eps_cap = Fraction(str(self.get_property('eps_cap')))
        self.degree_bound = int(self.get_property('degree_bound'))
        self.interpolate_rigid = bool(self.get_property('interpolate_rigid'))
        self.random_max_nodes = int(self.get_property('random_max_nodes'))
        self.random_seed = int(self.get_property('random_seed'))
        self.scene_format = self.get_property('scene_format')
        if self.eps_cap <= 0:
            raise Exception(f'Property eps_cap must be positive, got {self.eps_cap}')
        if self.scene_format not in SCENE_FORMATS:
            raise Exception(f'Property scene_format must be one of {SCENE_FORMATS}, got {self.scene_format}')

    def get_property(self, property_name):
        if property_name not in self.env_settings:
            raise Exception(f'Application property {property_name} was not found in .yml configuration file')
        return self.env_settings[property_name]


DISC_SETTINGS = DiscSettings(config_yml=DISC_YML)
