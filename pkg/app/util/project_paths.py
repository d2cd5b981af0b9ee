from pathlib import Path


def __get_disc_yml():
    return Path(__file__).parents[1] / "disc.yml"


def __get_scenes():
    return Path(__file__).parents[1] / "scenes"


def __get_scene(file_name):
    return __get_scenes() / file_name


DISC_YML = __get_disc_yml()
SCENES_DIR = __get_scenes()
SCENE_A = __get_scene('scene_a.yml')
SCENE_B = __get_scene('scene_b.yml')
SCENE_C = __get_scene('scene_c.yml')
SCENE_D = __get_scene('scene_d.yml')
