# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""wienerlab Tests Module"""
