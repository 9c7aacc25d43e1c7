# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

version_info = (0, 1, 0)
__version__ = ".".join(map(str, version_info))
