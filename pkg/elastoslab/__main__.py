# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import sys

from .cli import main

sys.exit(main())
